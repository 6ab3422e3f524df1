#include <doctest.h>

#include <cmath>

#include "permflag/presets.hpp"

using namespace permflag;

namespace {
Permutation P(const char* s) { return Permutation::parse(s); }
}

TEST_CASE("gamma formula matches the generic evaluator on a grid") {
  for (double a : {0.05, 0.1, 0.15, 0.2, 0.25}) {
    for (double c : {0.1, 0.25, 0.4, 0.5}) {
      if (1 - c - 2 * a < 0) continue;
      double formula = eval_gamma_1324(a, c);
      double exact = density_exact(P("1324"), gamma_permuton(a, c), 1e-14);
      CHECK(formula == doctest::Approx(exact).epsilon(1e-9));
    }
  }
}

TEST_CASE("gamma degenerates to three layers as a vanishes") {
  // a -> 0 leaves layers (1/4, 1/2, 1/4); compare against the closed form
  double v = eval_gamma_1324(1e-9, 0.5);
  CHECK(v == doctest::Approx(0.1875).epsilon(1e-6));
  CHECK_THROWS_AS(eval_gamma_1324(0.3, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(eval_gamma_1324(0.25, 0.52), std::invalid_argument);
  CHECK_THROWS_AS(eval_gamma_1324(0.2, 0.9), std::invalid_argument);
}

TEST_CASE("gamma optimization clears the published threshold") {
  auto opt = optimize_gamma_1324();
  CHECK(opt.value > 0.244054321);
  CHECK(opt.value < 0.244054549);  // stays below the upper bound
  CHECK(opt.a > 0);
  CHECK(opt.a <= 0.25);
  CHECK(opt.c > 0);
  CHECK(opt.c <= 0.5);
}

TEST_CASE("pi construction") {
  auto w = pi_reference_weights();
  double sum = 0;
  for (double v : w) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  double v = eval_pi_1342(w);
  CHECK(v > 0.198836597);
  CHECK(v < 0.198837287);  // below the certified upper bound

  std::array<double, 7> uniform;
  uniform.fill(1.0 / 7);
  CHECK(eval_pi_1342(uniform) < v);

  auto est = density_mc(P("1342"), pi_permuton(w), 400000, 2024);
  CHECK(std::abs(est.estimate - v) <= 4 * est.stderr_);
}

TEST_CASE("batkeyev value and its two closed forms") {
  double direct = eval_batkeyev();
  CHECK(std::abs(direct - 0.1965796) <= 1e-6);

  // geometric-series form of the same number
  double kap = constants::kappa();
  double lam = constants::lambda();
  double series = 4 * lam * std::pow(1 - kap, 3) * kap / (1 - std::pow(kap, 4));
  CHECK(std::abs(direct - series) <= 1e-12);
  CHECK(std::abs(direct - constants::gamma_1342()) <= 1e-14);

  // the permuton realizes it
  CHECK(density_exact(P("1342"), batkeyev_permuton(), 1e-14) ==
        doctest::Approx(direct).epsilon(1e-11));
}

TEST_CASE("table3 closed forms") {
  CHECK(std::abs(table3_preset("23154").value - 0.160394) <= 1e-6);
  CHECK(std::abs(table3_preset("231654").value - 0.1450317) <= 1e-6);
  CHECK(std::abs(table3_preset("231564").value - 0.0673094) <= 1e-6);
  CHECK(std::abs(table3_preset("231645").value - 0.0673094) <= 1e-6);
  CHECK(std::abs(table3_preset("215634").value - 720.0 / 5832.0) <= 1e-12);
  CHECK(std::abs(table3_preset("14523").value - 0.153649) <= 1e-5);
  CHECK(std::abs(table3_preset("21354").value - 0.16515) <= 1e-5);
  CHECK_THROWS_AS(table3_preset("54321"), std::invalid_argument);
}

TEST_CASE("table3 constructions evaluate to their stated values") {
  for (const auto& name : table3_names()) {
    auto p = table3_preset(name);
    double exact = density_exact(p.pattern, p.permuton, 1e-13);
    CHECK(exact == doctest::Approx(p.value).epsilon(1e-9));
  }
}

TEST_CASE("preset lookup") {
  CHECK(lookup_preset("batkeyev").has_value());
  CHECK(lookup_preset("pi1342").has_value());
  CHECK(lookup_preset("23154").has_value());
  CHECK(!lookup_preset("nope").has_value());
}
