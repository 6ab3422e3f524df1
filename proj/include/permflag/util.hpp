#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace permflag {

// Static partition of [0,n) over hardware threads. fn(i) must only touch
// state owned by index i; the first exception thrown (if any) is re-raised
// on the calling thread.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  std::size_t workers = hw == 0 ? 1 : hw;
  if (workers > n) workers = n == 0 ? 1 : n;
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errs(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) fn(i);
      } catch (...) {
        errs[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

// splitmix64, used to derive independent per-chunk RNG seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace permflag
