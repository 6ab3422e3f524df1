#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace permflag {

// Exact arithmetic carrier for densities, coefficient tables and
// certificates. mpq_class keeps values canonical (lowest terms, positive
// denominator) under arithmetic; the helpers below canonicalize at the
// construction boundary.
using Rational = mpq_class;

Rational make_rational(long num, long den);

// Parses "p/q" or "p" (arbitrary precision). Throws std::invalid_argument
// on malformed input or zero denominator.
Rational parse_rational(const std::string& s);

// Canonical "p/q" form; integers render without the "/1".
std::string rational_to_string(const Rational& r);

// Exact binomial coefficient, 0 when k < 0 or k > n.
Rational binomial(int n, int k);

// Nearest multiple of 2^-k as an exact rational.
Rational round_to_dyadic(double x, int k);

// Dense square matrix of rationals, row major. Used both for the rounded
// Cholesky factors L (lower triangular) and the exact Q = L L^T.
class RationalMatrix {
 public:
  RationalMatrix() : dim_(0) {}
  explicit RationalMatrix(int dim) : dim_(dim), a_(static_cast<std::size_t>(dim) * dim, Rational(0)) {}

  int dim() const { return dim_; }
  Rational& at(int i, int j) { return a_[static_cast<std::size_t>(i) * dim_ + j]; }
  const Rational& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * dim_ + j]; }

  bool is_lower_triangular() const;
  bool diagonal_nonnegative() const;

  // L * L^T, exact.
  RationalMatrix gram() const;

  bool operator==(const RationalMatrix& o) const { return dim_ == o.dim_ && a_ == o.a_; }

 private:
  int dim_;
  std::vector<Rational> a_;
};

}  // namespace permflag
