#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "permflag/perm.hpp"

namespace permflag {

// A type: a small permutation whose points are labeled by position.
struct TypePerm {
  Permutation tau;
  int t() const { return tau.size(); }
  bool operator==(const TypePerm&) const = default;
  auto operator<=>(const TypePerm&) const = default;
};

// A flag: a base permutation with a distinguished support inducing the
// type. Two flags are equal iff bases and supports are identical.
struct Flag {
  Permutation base;
  std::vector<int> support;  // 1-based positions, strictly increasing
  TypePerm type;             // = base.subpattern(support), cached

  static Flag make(Permutation base, std::vector<int> support);
  int m() const { return base.size(); }
  bool operator==(const Flag& o) const { return base == o.base && support == o.support; }
  auto operator<=>(const Flag& o) const {
    if (auto c = base <=> o.base; c != 0) return c;
    return support <=> o.support;
  }
};

std::vector<TypePerm> enumerate_types(int t, const ForbiddenSet& f, bool layered_only = false);

// All flags of length m over admissible bases whose support induces the
// type, ordered lexicographically by (base, support).
std::vector<Flag> enumerate_flags(int m, const TypePerm& type, const ForbiddenSet& f,
                                  bool layered_only = false);

// The flag induced in `base` by the position set `subset` (which must
// contain `support`): the base restricts to subset, the support positions
// are renumbered within it.
Flag induced_flag(const Permutation& base, const std::vector<int>& support,
                  const std::vector<int>& subset);

Rational flag_density(const Flag& s, const Flag& p);

// Probability that two random extensions of the root of p, disjoint
// outside it, of sizes |s1| and |s2|, induce s1 and s2 respectively.
Rational joint_density(const Flag& s1, const Flag& s2, const Flag& p);

// All (t, m) with 2m - t = N, 0 <= t < m.
std::vector<std::pair<int, int>> admissible_pairs(int N);

// Root-averaged joint densities: for each admissible target P' of length
// N and flag pair i <= j, the exact coefficient
//   (1/C(N,t)) * sum over all t-subsets sigma of p(S_i, S_j; (P', sigma)),
// where subsets not inducing the type contribute zero.
class FlagProductTable {
 public:
  struct Entry {
    int i, j;  // i <= j
    Rational value;
  };

  TypePerm type;
  int m = 0;
  int target_length = 0;
  ForbiddenSet forbidden;
  bool layered_only = false;
  std::vector<Flag> flags;
  std::vector<Permutation> targets;      // canonical order
  std::vector<std::vector<Entry>> rows;  // one per target, sorted by (i,j)

  std::size_t flag_count() const { return flags.size(); }

  // Sum over ordered pairs for one target; equals the fraction of
  // t-subsets of the target inducing the type.
  Rational ordered_mass(std::size_t target_index) const;

  void write(std::ostream& os) const;
  static std::optional<FlagProductTable> read(std::istream& is);
};

// Computes the table, consulting/announcing the on-disk cache when
// cache_dir is nonempty. Cache files are plain text, one per parameter
// combination, and byte reproducible.
FlagProductTable build_product_table(int N, const TypePerm& type, int m, const ForbiddenSet& f,
                                     bool layered_only = false, const std::string& cache_dir = "");

}  // namespace permflag
