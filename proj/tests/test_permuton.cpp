#include <doctest.h>

#include <cmath>

#include "permflag/layered.hpp"
#include "permflag/permuton.hpp"

using namespace permflag;

namespace {
Permutation P(const char* s) { return Permutation::parse(s); }

Permuton two_layers() {
  return Permuton::diagonal_sum({{0.5, Permuton::decreasing()}, {0.5, Permuton::decreasing()}});
}
}

TEST_CASE("constants") {
  CHECK(constants::lambda() == doctest::Approx(0.4641016151377546).epsilon(1e-14));
  CHECK(constants::beta_layered() == doctest::Approx(0.42357).epsilon(1e-4));
  CHECK(constants::gamma_1342() == doctest::Approx(0.19657960).epsilon(1e-7));
  double k = constants::kappa();
  CHECK(k > 0);
  CHECK(k < 1);
  CHECK(std::abs(3 * k * k * k * k - 4 * k + 1) < 1e-14);
}

TEST_CASE("monotone leaves") {
  CHECK(density_exact(P("123"), Permuton::decreasing()) == 0);
  CHECK(density_exact(P("321"), Permuton::decreasing()) == 1);
  CHECK(density_exact(P("12"), Permuton::increasing()) == 1);
  CHECK(density_exact(P("1"), Permuton::decreasing()) == 1);
  CHECK(density_exact(P(""), Permuton::increasing()) == 1);
}

TEST_CASE("two balanced decreasing layers") {
  CHECK(density_exact(P("12"), two_layers()) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(density_exact(P("21"), two_layers()) == doctest::Approx(0.5).epsilon(1e-14));
  // 2143 needs one descent in each layer
  CHECK(density_exact(P("2143"), two_layers()) == doctest::Approx(0.375).epsilon(1e-14));
}

TEST_CASE("named maximisers hit their packing densities") {
  double lam = constants::lambda();
  for (const char* s : {"132", "213", "231", "312"})
    CHECK(density_exact(P(s), Permuton::maximiser(P(s))) == doctest::Approx(lam).epsilon(1e-13));
  CHECK(density_exact(P("1432"), Permuton::maximiser(P("1432"))) ==
        doctest::Approx(constants::beta_layered()).epsilon(1e-13));
  CHECK_THROWS_AS(Permuton::maximiser(P("2413")), std::invalid_argument);
}

TEST_CASE("density partition over all patterns of a given size") {
  std::vector<Permuton> mus = {two_layers(), Permuton::maximiser(P("132")),
                               Permuton::maximiser(P("231"))};
  for (const auto& mu : mus) {
    for (int m = 2; m <= 4; ++m) {
      double sum = 0;
      for (const auto& s : enumerate(m, ForbiddenSet())) sum += density_exact(s, mu);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("layered density equals the grid evaluation") {
  std::vector<double> x = {0.2, 0.5, 0.3};
  Permuton mu = Permuton::diagonal_sum({{x[0], Permuton::decreasing()},
                                        {x[1], Permuton::decreasing()},
                                        {x[2], Permuton::decreasing()}});
  for (const char* pat : {"132", "1324", "21", "2143", "321"}) {
    Permutation s = P(pat);
    CHECK(layered_density(s.layer_profile(), x) ==
          doctest::Approx(density_exact(s, mu)).epsilon(1e-12));
  }
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS(Permuton::grid({0.5, 0.5}, {0.6, 0.4},
                                 {{{0, 0}, Permuton::decreasing()},
                                  {{1, 1}, Permuton::decreasing()}}),
                  std::invalid_argument);  // cells not square
  CHECK_THROWS_AS(Permuton::grid({0.5, 0.5}, {0.5, 0.5},
                                 {{{0, 0}, Permuton::decreasing()},
                                  {{0, 1}, Permuton::decreasing()}}),
                  std::invalid_argument);  // two cells in one row
  CHECK_THROWS_AS(Permuton::grid({0.5, 0.5}, {0.5, 0.5},
                                 {{{0, 0}, Permuton::decreasing()}}),
                  std::invalid_argument);  // uncovered positive row
  CHECK_THROWS_AS(Permuton::grid({0.3, 0.3, 0.3}, {0.3, 0.3, 0.3},
                                 {{{0, 0}, Permuton::decreasing()},
                                  {{1, 1}, Permuton::decreasing()},
                                  {{2, 2}, Permuton::decreasing()}}),
                  std::invalid_argument);  // masses sum to 0.9
  CHECK_THROWS_AS(density_exact(P("12"), Permuton::recurse()), std::invalid_argument);
  CHECK_THROWS_AS(density_exact(P("12"), two_layers(), 0.0), std::invalid_argument);
}

TEST_CASE("monte carlo agrees with the exact evaluator") {
  struct Case {
    const char* pattern;
    Permuton mu;
  };
  std::vector<Case> cases;
  cases.push_back({"12", Permuton::increasing()});
  cases.push_back({"132", Permuton::maximiser(P("132"))});
  cases.push_back({"2143", two_layers()});
  for (auto& c : cases) {
    double exact = density_exact(P(c.pattern), c.mu);
    auto est = density_mc(P(c.pattern), c.mu, 200000, 42);
    double sigma = std::max(est.stderr_, 1e-9);
    CHECK(std::abs(est.estimate - exact) <= 4 * sigma);
  }
  // ascending pairs in the increasing permuton: every sample hits
  auto sure = density_mc(P("12"), Permuton::increasing(), 1000, 7);
  CHECK(sure.estimate == 1.0);
}

TEST_CASE("monte carlo is deterministic for a fixed seed") {
  auto a = density_mc(P("132"), Permuton::maximiser(P("132")), 100000, 9);
  auto b = density_mc(P("132"), Permuton::maximiser(P("132")), 100000, 9);
  CHECK(a.hits == b.hits);
  auto c = density_mc(P("132"), Permuton::maximiser(P("132")), 100000, 10);
  CHECK(a.hits != c.hits);
}

TEST_CASE("json round trip") {
  Permuton mu = Permuton::grid(
      {0.25, 0.75}, {0.25, 0.75},
      {{{0, 0}, Permuton::recurse()}, {{1, 1}, Permuton::maximiser(P("231"))}});
  std::string text = mu.to_json();
  Permuton back = Permuton::from_json(text);
  CHECK(back.to_json() == text);
  for (const char* pat : {"1342", "123", "21"})
    CHECK(density_exact(P(pat), back) == doctest::Approx(density_exact(P(pat), mu)).epsilon(1e-14));
  CHECK_THROWS(Permuton::from_json("{\"kind\": \"pyramid\"}"));
  CHECK_THROWS(Permuton::from_json("{\"kind\": \"max\", \"pattern\": \"2413\"}"));
}
