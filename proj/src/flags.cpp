#include "permflag/flags.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "permflag/util.hpp"

namespace permflag {

namespace {

void all_subsets(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  // 1-based k-subsets of {1..n} in lexicographic order.
  if (k < 0 || k > n) return;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 1);
  if (k == 0) {
    fn(idx);
    return;
  }
  while (true) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i + 1) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::vector<int> complement_of(const std::vector<int>& subset, int n) {
  std::vector<int> rest;
  rest.reserve(n - subset.size());
  std::size_t k = 0;
  for (int v = 1; v <= n; ++v) {
    if (k < subset.size() && subset[k] == v)
      ++k;
    else
      rest.push_back(v);
  }
  return rest;
}

std::vector<int> merge_sorted(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), out.begin());
  return out;
}

std::string cache_file_name(int N, const TypePerm& type, int m, const ForbiddenSet& f,
                            bool layered_only) {
  std::string tau = type.t() == 0 ? "e" : type.tau.to_string();
  std::string forb = f.empty() ? "none" : f.to_string();
  for (char& c : forb)
    if (c == ',') c = '+';
  std::string mode = layered_only ? "lay" : "all";
  return "tbl_N" + std::to_string(N) + "_t" + tau + "_m" + std::to_string(m) + "_f" + forb + "_" +
         mode + ".txt";
}

}  // namespace

Flag Flag::make(Permutation base, std::vector<int> support) {
  Flag f;
  f.type = TypePerm{base.subpattern(support)};
  f.base = std::move(base);
  f.support = std::move(support);
  return f;
}

std::vector<TypePerm> enumerate_types(int t, const ForbiddenSet& f, bool layered_only) {
  std::vector<TypePerm> out;
  for (auto& p : enumerate(t, f, layered_only)) out.push_back(TypePerm{p});
  return out;
}

std::vector<Flag> enumerate_flags(int m, const TypePerm& type, const ForbiddenSet& f,
                                  bool layered_only) {
  if (m < type.t()) throw std::invalid_argument("flag length below type length");
  std::vector<Flag> out;
  for (auto& base : enumerate(m, f, layered_only)) {
    all_subsets(m, type.t(), [&](const std::vector<int>& sup) {
      if (base.subpattern(sup) == type.tau) out.push_back(Flag::make(base, sup));
    });
  }
  return out;
}

Flag induced_flag(const Permutation& base, const std::vector<int>& support,
                  const std::vector<int>& subset) {
  std::vector<int> new_support;
  new_support.reserve(support.size());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (std::binary_search(support.begin(), support.end(), subset[i]))
      new_support.push_back(static_cast<int>(i) + 1);
  }
  if (new_support.size() != support.size()) throw std::invalid_argument("subset must contain support");
  return Flag::make(base.subpattern(subset), std::move(new_support));
}

Rational flag_density(const Flag& s, const Flag& p) {
  if (s.type != p.type) throw std::invalid_argument("flag type mismatch");
  if (s.m() > p.m()) throw std::invalid_argument("flag longer than host");
  int t = s.type.t();
  int need = s.m() - t;
  long hits = 0;
  const auto rest = complement_of(p.support, p.m());
  all_subsets(static_cast<int>(rest.size()), need, [&](const std::vector<int>& pick) {
    std::vector<int> chosen;
    chosen.reserve(need);
    for (int r : pick) chosen.push_back(rest[r - 1]);
    Flag g = induced_flag(p.base, p.support, merge_sorted(p.support, chosen));
    if (g == s) ++hits;
  });
  return Rational(hits) / binomial(p.m() - t, need);
}

Rational joint_density(const Flag& s1, const Flag& s2, const Flag& p) {
  if (s1.type != p.type || s2.type != p.type) throw std::invalid_argument("flag type mismatch");
  int t = p.type.t();
  int n = p.m(), m1 = s1.m(), m2 = s2.m();
  if (m1 + m2 - t > n) throw std::invalid_argument("host too short for joint density");
  const auto rest = complement_of(p.support, n);
  long hits = 0;
  all_subsets(static_cast<int>(rest.size()), m1 - t, [&](const std::vector<int>& pick1) {
    std::vector<int> a;
    for (int r : pick1) a.push_back(rest[r - 1]);
    if (induced_flag(p.base, p.support, merge_sorted(p.support, a)) != s1) return;
    auto rest2 = complement_of(merge_sorted(p.support, a), n);
    // rest2 holds indices usable by the second set
    all_subsets(static_cast<int>(rest2.size()), m2 - t, [&](const std::vector<int>& pick2) {
      std::vector<int> b;
      for (int r : pick2) b.push_back(rest2[r - 1]);
      if (induced_flag(p.base, p.support, merge_sorted(p.support, b)) == s2) ++hits;
    });
  });
  return Rational(hits) / (binomial(n - t, m1 - t) * binomial(n - m1, m2 - t));
}

std::vector<std::pair<int, int>> admissible_pairs(int N) {
  if (N < 1) throw std::invalid_argument("N must be positive");
  std::vector<std::pair<int, int>> out;
  for (int t = N % 2; t <= N - 2; t += 2) out.emplace_back(t, (N + t) / 2);
  return out;
}

Rational FlagProductTable::ordered_mass(std::size_t target_index) const {
  Rational s(0);
  for (const auto& e : rows[target_index]) s += e.i == e.j ? e.value : 2 * e.value;
  return s;
}

void FlagProductTable::write(std::ostream& os) const {
  os << "permflag-table v1\n";
  os << "N " << target_length << "\n";
  os << "tau " << (type.t() == 0 ? "e" : type.tau.to_string()) << "\n";
  os << "m " << m << "\n";
  os << "forbidden " << forbidden.to_string() << "\n";
  os << "layered " << (layered_only ? 1 : 0) << "\n";
  os << "flags " << flags.size() << "\n";
  for (const auto& fl : flags) {
    os << fl.base.to_string();
    for (int s : fl.support) os << " " << s;
    os << "\n";
  }
  os << "targets " << targets.size() << "\n";
  for (std::size_t p = 0; p < targets.size(); ++p)
    for (const auto& e : rows[p])
      os << p << " " << e.i << " " << e.j << " " << rational_to_string(e.value) << "\n";
  os << "end\n";
}

std::optional<FlagProductTable> FlagProductTable::read(std::istream& is) {
  FlagProductTable tbl;
  std::string line;
  if (!std::getline(is, line) || line != "permflag-table v1") return std::nullopt;
  std::string key, val;
  auto expect = [&](const std::string& k) -> std::optional<std::string> {
    if (!std::getline(is, line)) return std::nullopt;
    auto sp = line.find(' ');
    if (sp == std::string::npos || line.substr(0, sp) != k) return std::nullopt;
    return line.substr(sp + 1);
  };
  try {
    auto v = expect("N");
    if (!v) return std::nullopt;
    tbl.target_length = std::stoi(*v);
    v = expect("tau");
    if (!v) return std::nullopt;
    tbl.type = TypePerm{*v == "e" ? Permutation() : Permutation::parse(*v)};
    v = expect("m");
    if (!v) return std::nullopt;
    tbl.m = std::stoi(*v);
    v = expect("forbidden");
    if (!v) return std::nullopt;
    if (*v != "-") {
      std::vector<Permutation> pats;
      std::stringstream ss(*v);
      std::string tok;
      while (std::getline(ss, tok, ',')) pats.push_back(Permutation::parse(tok));
      tbl.forbidden = ForbiddenSet(std::move(pats));
    }
    v = expect("layered");
    if (!v) return std::nullopt;
    tbl.layered_only = *v == "1";
    v = expect("flags");
    if (!v) return std::nullopt;
    int nflags = std::stoi(*v);
    for (int i = 0; i < nflags; ++i) {
      if (!std::getline(is, line)) return std::nullopt;
      std::stringstream ss(line);
      std::string b;
      ss >> b;
      std::vector<int> sup;
      int x;
      while (ss >> x) sup.push_back(x);
      tbl.flags.push_back(Flag::make(Permutation::parse(b), std::move(sup)));
    }
    v = expect("targets");
    if (!v) return std::nullopt;
    int ntargets = std::stoi(*v);
    tbl.targets = enumerate(tbl.target_length, tbl.forbidden, tbl.layered_only);
    if (static_cast<int>(tbl.targets.size()) != ntargets) return std::nullopt;
    tbl.rows.resize(tbl.targets.size());
    while (std::getline(is, line) && line != "end") {
      std::stringstream ss(line);
      std::size_t p;
      int i, j;
      std::string r;
      if (!(ss >> p >> i >> j >> r)) return std::nullopt;
      if (p >= tbl.rows.size()) return std::nullopt;
      tbl.rows[p].push_back({i, j, parse_rational(r)});
    }
    if (line != "end") return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return tbl;
}

FlagProductTable build_product_table(int N, const TypePerm& type, int m, const ForbiddenSet& f,
                                     bool layered_only, const std::string& cache_dir) {
  int t = type.t();
  if (2 * m - t != N) throw std::invalid_argument("need N = 2m - t");

  std::filesystem::path cache_path;
  if (!cache_dir.empty()) {
    cache_path = std::filesystem::path(cache_dir) / cache_file_name(N, type, m, f, layered_only);
    std::ifstream in(cache_path);
    if (in) {
      auto tbl = FlagProductTable::read(in);
      if (tbl && tbl->target_length == N && tbl->type == type && tbl->m == m &&
          tbl->forbidden == f && tbl->layered_only == layered_only)
        return *tbl;
    }
  }

  FlagProductTable tbl;
  tbl.type = type;
  tbl.m = m;
  tbl.target_length = N;
  tbl.forbidden = f;
  tbl.layered_only = layered_only;
  tbl.flags = enumerate_flags(m, type, f, layered_only);
  tbl.targets = enumerate(N, f, layered_only);
  tbl.rows.resize(tbl.targets.size());

  std::map<Flag, int> index;
  for (std::size_t i = 0; i < tbl.flags.size(); ++i) index[tbl.flags[i]] = static_cast<int>(i);

  // Denominator shared by every sigma: root choices times the two
  // extension counts.
  Rational denom = binomial(N, t) * binomial(N - t, m - t) * binomial(N - m, m - t);

  parallel_for(tbl.targets.size(), [&](std::size_t pi) {
    const Permutation& target = tbl.targets[pi];
    std::map<std::pair<int, int>, long> counts;
    all_subsets(N, t, [&](const std::vector<int>& sigma) {
      if (target.subpattern(sigma) != type.tau) return;  // contributes zero
      const auto rest = complement_of(sigma, N);
      all_subsets(static_cast<int>(rest.size()), m - t, [&](const std::vector<int>& pick1) {
        std::vector<int> a;
        for (int r : pick1) a.push_back(rest[r - 1]);
        auto it1 = index.find(induced_flag(target, sigma, merge_sorted(sigma, a)));
        if (it1 == index.end()) throw std::logic_error("induced flag missing from flag list");
        auto rest2 = complement_of(merge_sorted(sigma, a), N);
        all_subsets(static_cast<int>(rest2.size()), m - t, [&](const std::vector<int>& pick2) {
          std::vector<int> b;
          for (int r : pick2) b.push_back(rest2[r - 1]);
          auto it2 = index.find(induced_flag(target, sigma, merge_sorted(sigma, b)));
          if (it2 == index.end()) throw std::logic_error("induced flag missing from flag list");
          int i = it1->second, j = it2->second;
          counts[{std::min(i, j), std::max(i, j)}] += 1;
        });
      });
    });
    auto& row = tbl.rows[pi];
    row.reserve(counts.size());
    for (const auto& [ij, cnt] : counts) {
      // Off-diagonal counts collected both ordered ways; store the
      // symmetric per-ordered-pair value.
      Rational v = Rational(cnt) / denom;
      if (ij.first != ij.second) v /= 2;
      row.push_back({ij.first, ij.second, v});
    }
  });

  if (!cache_path.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cache_path.parent_path(), ec);
    auto tmp = cache_path;
    tmp += ".tmp";
    std::ofstream out(tmp);
    if (out) {
      tbl.write(out);
      out.close();
      std::filesystem::rename(tmp, cache_path, ec);
    }
  }
  return tbl;
}

}  // namespace permflag
