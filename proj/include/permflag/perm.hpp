#pragma once

#include <compare>
#include <string>
#include <vector>

#include "permflag/rational.hpp"

namespace permflag {

// A permutation of {1..n} in one-line notation. The empty permutation
// (n = 0) is valid. Immutable after construction.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> values);

  static Permutation identity(int n);
  // Relative order of an arbitrary sequence of distinct values.
  static Permutation standardize(const std::vector<int>& values);
  // Accepts digit strings ("1324") for n <= 9 and comma separated
  // values ("10,1,2") otherwise. "" parses to the empty permutation.
  static Permutation parse(const std::string& s);

  int size() const { return static_cast<int>(vals_.size()); }
  int operator[](int i) const { return vals_[i]; }  // 0-based position
  const std::vector<int>& values() const { return vals_; }

  std::string to_string() const;

  // positions: strictly increasing 1-based indices into this permutation.
  Permutation subpattern(const std::vector<int>& positions) const;

  bool contains(const Permutation& pattern) const;

  Permutation reverse() const;
  Permutation complement() const;
  Permutation inverse() const;

  bool is_layered() const;
  // Sizes of the maximal decreasing blocks, left to right. Throws on
  // non-layered input.
  std::vector<int> layer_profile() const;
  static Permutation from_layers(const std::vector<int>& layers);

  auto operator<=>(const Permutation&) const = default;

 private:
  std::vector<int> vals_;
};

// Canonicalized antichain of forbidden patterns: duplicates and patterns
// containing another member are dropped, so identical avoidance classes
// compare equal.
class ForbiddenSet {
 public:
  ForbiddenSet() = default;
  explicit ForbiddenSet(std::vector<Permutation> patterns);

  const std::vector<Permutation>& patterns() const { return pats_; }
  bool empty() const { return pats_.empty(); }
  bool allows(const Permutation& p) const;  // p avoids every member

  std::string to_string() const;  // "-" when empty, else comma separated

  bool operator==(const ForbiddenSet&) const = default;

 private:
  std::vector<Permutation> pats_;
};

// Number of position subsets of p inducing the pattern s.
long count_occurrences(const Permutation& s, const Permutation& p);

// count_occurrences(s, p) / C(|p|, |s|); zero when |p| < |s|.
Rational density(const Permutation& s, const Permutation& p);

// All f-avoiding permutations of length n in lexicographic one-line order.
// layered_only further restricts to layered permutations.
std::vector<Permutation> enumerate(int n, const ForbiddenSet& f, bool layered_only = false);

}  // namespace permflag
