#include "permflag/perm.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace permflag {

namespace {

// Walks all k-subsets of {0..n-1} in lexicographic order.
bool next_combination(std::vector<int>& idx, int n) {
  int k = static_cast<int>(idx.size());
  for (int i = k - 1; i >= 0; --i) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

bool matches_at(const Permutation& s, const Permutation& p, const std::vector<int>& idx) {
  int m = s.size();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if ((s[i] < s[j]) != (p[idx[i]] < p[idx[j]])) return false;
  return true;
}

void gen_layered(int n, std::vector<int>& layers, const ForbiddenSet& f,
                 std::vector<Permutation>& out) {
  if (n == 0) {
    Permutation p = Permutation::from_layers(layers);
    if (f.allows(p)) out.push_back(p);
    return;
  }
  // First layer sizes in increasing order produce lexicographic one-line
  // order: the permutation starts with its first layer size.
  for (int k = 1; k <= n; ++k) {
    layers.push_back(k);
    gen_layered(n - k, layers, f, out);
    layers.pop_back();
  }
}

}  // namespace

Permutation::Permutation(std::vector<int> values) : vals_(std::move(values)) {
  int n = size();
  std::vector<char> seen(static_cast<std::size_t>(n) + 1, 0);
  for (int v : vals_) {
    if (v < 1 || v > n || seen[v]) throw std::invalid_argument("not a permutation of {1..n}");
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 1);
  return Permutation(std::move(v));
}

Permutation Permutation::standardize(const std::vector<int>& values) {
  std::vector<int> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), values[i]);
    out[i] = static_cast<int>(it - sorted.begin()) + 1;
  }
  return Permutation(std::move(out));
}

Permutation Permutation::parse(const std::string& s) {
  std::vector<int> v;
  if (s.empty()) return Permutation();
  if (s.find(',') != std::string::npos) {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) throw std::invalid_argument("malformed permutation: " + s);
      v.push_back(std::stoi(tok));
    }
  } else {
    for (char c : s) {
      if (c < '1' || c > '9') throw std::invalid_argument("malformed permutation: " + s);
      v.push_back(c - '0');
    }
  }
  return Permutation(std::move(v));
}

std::string Permutation::to_string() const {
  std::string out;
  if (size() <= 9) {
    for (int v : vals_) out.push_back(static_cast<char>('0' + v));
  } else {
    for (int i = 0; i < size(); ++i) {
      if (i) out.push_back(',');
      out += std::to_string(vals_[i]);
    }
  }
  return out;
}

Permutation Permutation::subpattern(const std::vector<int>& positions) const {
  std::vector<int> picked;
  picked.reserve(positions.size());
  int prev = 0;
  for (int pos : positions) {
    if (pos <= prev || pos > size()) throw std::invalid_argument("bad position set");
    picked.push_back(vals_[pos - 1]);
    prev = pos;
  }
  return standardize(picked);
}

bool Permutation::contains(const Permutation& pattern) const {
  int m = pattern.size(), n = size();
  if (m > n) return false;
  if (m == 0) return true;
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  do {
    if (matches_at(pattern, *this, idx)) return true;
  } while (next_combination(idx, n));
  return false;
}

Permutation Permutation::reverse() const {
  std::vector<int> v(vals_.rbegin(), vals_.rend());
  return Permutation(std::move(v));
}

Permutation Permutation::complement() const {
  std::vector<int> v(vals_);
  for (int& x : v) x = size() + 1 - x;
  return Permutation(std::move(v));
}

Permutation Permutation::inverse() const {
  std::vector<int> v(vals_.size());
  for (int i = 0; i < size(); ++i) v[vals_[i] - 1] = i + 1;
  return Permutation(std::move(v));
}

bool Permutation::is_layered() const {
  // A layered permutation is a sequence of decreasing runs, each on a
  // block of consecutive integers sitting above everything before it.
  int i = 0, floor = 0, n = size();
  while (i < n) {
    int top = vals_[i];
    if (top <= floor) return false;
    // run must descend top, top-1, ..., floor+1
    int expect = top;
    while (i < n && expect > floor) {
      if (vals_[i] != expect) return false;
      ++i;
      --expect;
    }
    floor = top;
  }
  return true;
}

std::vector<int> Permutation::layer_profile() const {
  if (!is_layered()) throw std::invalid_argument("not a layered permutation");
  std::vector<int> layers;
  int i = 0, floor = 0, n = size();
  while (i < n) {
    int top = vals_[i];
    layers.push_back(top - floor);
    i += top - floor;
    floor = top;
  }
  return layers;
}

Permutation Permutation::from_layers(const std::vector<int>& layers) {
  std::vector<int> v;
  int base = 0;
  for (int k : layers) {
    if (k <= 0) throw std::invalid_argument("layer sizes must be positive");
    for (int j = 0; j < k; ++j) v.push_back(base + k - j);
    base += k;
  }
  return Permutation(std::move(v));
}

ForbiddenSet::ForbiddenSet(std::vector<Permutation> patterns) {
  std::sort(patterns.begin(), patterns.end(), [](const Permutation& a, const Permutation& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
  // Drop members containing a smaller member: avoiding the smaller one
  // already forbids them.
  for (const auto& p : patterns) {
    bool redundant = false;
    for (const auto& q : pats_) {
      if (q.size() < p.size() && p.contains(q)) {
        redundant = true;
        break;
      }
    }
    if (!redundant) pats_.push_back(p);
  }
}

bool ForbiddenSet::allows(const Permutation& p) const {
  for (const auto& f : pats_)
    if (p.contains(f)) return false;
  return true;
}

std::string ForbiddenSet::to_string() const {
  if (pats_.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < pats_.size(); ++i) {
    if (i) out.push_back(',');
    out += pats_[i].to_string();
  }
  return out;
}

long count_occurrences(const Permutation& s, const Permutation& p) {
  int m = s.size(), n = p.size();
  if (m > n) return 0;
  if (m == 0) return 1;
  long cnt = 0;
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  do {
    if (matches_at(s, p, idx)) ++cnt;
  } while (next_combination(idx, n));
  return cnt;
}

Rational density(const Permutation& s, const Permutation& p) {
  if (s.size() > p.size()) return Rational(0);
  Rational r(count_occurrences(s, p));
  return r / binomial(p.size(), s.size());
}

std::vector<Permutation> enumerate(int n, const ForbiddenSet& f, bool layered_only) {
  if (n < 0) throw std::invalid_argument("negative length");
  std::vector<Permutation> out;
  if (n == 0) {
    Permutation empty;
    if (f.allows(empty)) out.push_back(empty);
    return out;
  }
  if (layered_only) {
    std::vector<int> layers;
    gen_layered(n, layers, f, out);
    return out;
  }
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 1);
  do {
    Permutation p(v);
    if (f.allows(p)) out.push_back(p);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

}  // namespace permflag
