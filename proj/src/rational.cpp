#include "permflag/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace permflag {

Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  mpq_class r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("malformed rational: " + s);
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  r.canonicalize();
  return r;
}

std::string rational_to_string(const Rational& r) { return r.get_str(); }

Rational binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return Rational(0);
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rational(b);
}

Rational round_to_dyadic(double x, int k) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot round non-finite value");
  double scaled = std::ldexp(x, k);
  if (std::abs(scaled) > 9.0e18) throw std::invalid_argument("value too large for dyadic rounding");
  mpz_class num(static_cast<long>(std::llround(scaled)));
  mpz_class den = mpz_class(1) << k;
  Rational r(num, den);
  r.canonicalize();
  return r;
}

bool RationalMatrix::is_lower_triangular() const {
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      if (at(i, j) != 0) return false;
  return true;
}

bool RationalMatrix::diagonal_nonnegative() const {
  for (int i = 0; i < dim_; ++i)
    if (at(i, i) < 0) return false;
  return true;
}

RationalMatrix RationalMatrix::gram() const {
  RationalMatrix q(dim_);
  for (int i = 0; i < dim_; ++i) {
    for (int j = 0; j <= i; ++j) {
      Rational s(0);
      // L is lower triangular, so the inner sum stops at min(i, j).
      for (int k = 0; k <= j; ++k) s += at(i, k) * at(j, k);
      q.at(i, j) = s;
      q.at(j, i) = s;
    }
  }
  return q;
}

}  // namespace permflag
