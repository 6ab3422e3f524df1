#include "permflag/sdp.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace permflag {

namespace {

// Shortest round-trip decimal form of the double nearest the rational.
std::string decimal(const Rational& r) {
  double d = r.get_d();
  if (d == 0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), d);
  return std::string(buf, res.ptr);
}

}  // namespace

std::vector<int> SdpProblem::block_sizes() const {
  std::vector<int> out;
  out.reserve(tables.size());
  for (const auto& t : tables) out.push_back(static_cast<int>(t.flag_count()));
  return out;
}

SdpProblem assemble(const Permutation& s, int N, const ForbiddenSet& f, bool layered_only,
                    const std::string& cache_dir) {
  if (s.size() > N) throw std::invalid_argument("pattern longer than N");
  if (layered_only && !s.is_layered())
    throw std::invalid_argument("layered-only mode needs a layered density pattern");

  SdpProblem prob;
  prob.pattern = s;
  prob.n_target = N;
  prob.forbidden = f;
  prob.layered_only = layered_only;
  prob.admissible = enumerate(N, f, layered_only);
  if (prob.admissible.empty())
    throw std::invalid_argument("no admissible permutations of length " + std::to_string(N));
  prob.objective.reserve(prob.admissible.size());
  for (const auto& p : prob.admissible) prob.objective.push_back(density(s, p));

  for (auto [t, m] : admissible_pairs(N)) {
    for (const auto& type : enumerate_types(t, f, layered_only)) {
      auto tbl = build_product_table(N, type, m, f, layered_only, cache_dir);
      if (tbl.flag_count() > 0) prob.tables.push_back(std::move(tbl));
    }
  }
  return prob;
}

Rational crude_bound(const Permutation& s, int N, const ForbiddenSet& f, bool layered_only) {
  if (s.size() > N) throw std::invalid_argument("pattern longer than N");
  auto perms = enumerate(N, f, layered_only);
  if (perms.empty())
    throw std::invalid_argument("no admissible permutations of length " + std::to_string(N));
  Rational best(0);
  for (const auto& p : perms) {
    Rational d = density(s, p);
    if (d > best) best = d;
  }
  return best;
}

void emit_sdpa(const SdpProblem& problem, std::ostream& os) {
  const int ncons = static_cast<int>(problem.admissible.size());
  const auto sizes = problem.block_sizes();
  const int ntypes = static_cast<int>(sizes.size());
  const int slack = ncons + 1;  // one slot per permutation + normalization

  os << ncons << "\n";
  os << ntypes + 1 << "\n";
  for (int s : sizes) os << s << " ";
  os << "-" << slack << "\n";
  for (int i = 0; i < ncons; ++i) {
    if (i) os << " ";
    os << decimal(-problem.objective[i]);
  }
  os << "\n";

  // F0: only the normalization slot of the slack block.
  os << "0 " << ntypes + 1 << " " << slack << " " << slack << " -1\n";

  for (int ci = 0; ci < ncons; ++ci) {
    for (int b = 0; b < ntypes; ++b) {
      for (const auto& e : problem.tables[b].rows[ci]) {
        if (e.value == 0) continue;
        os << ci + 1 << " " << b + 1 << " " << e.i + 1 << " " << e.j + 1 << " " << decimal(e.value)
           << "\n";
      }
    }
    os << ci + 1 << " " << ntypes + 1 << " " << ci + 1 << " " << ci + 1 << " 1\n";
    os << ci + 1 << " " << ntypes + 1 << " " << slack << " " << slack << " -1\n";
  }
}

void emit_sdpa(const SdpProblem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  emit_sdpa(problem, out);
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace permflag
