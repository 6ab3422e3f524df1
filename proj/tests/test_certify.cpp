#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "permflag/certify.hpp"
#include "permflag/permuton.hpp"

using namespace permflag;

namespace {

Permutation P(const char* s) { return Permutation::parse(s); }

// A solver-free numeric solution for the 132 problem at N = 3: the known
// optimal Q matrix, written in this library's flag order. It is PSD with
// rank 2, which also exercises the rank-deficient Cholesky path.
NumericSolution known_132_solution() {
  double lam = 2 * std::sqrt(3.0) - 3;
  double g = 3 * (lam - 1) / 2;
  std::vector<double> q(16, 0.0);
  q[1 * 4 + 1] = 3 * lam;
  q[1 * 4 + 2] = g;
  q[2 * 4 + 1] = g;
  q[1 * 4 + 3] = g;
  q[3 * 4 + 1] = g;
  q[2 * 4 + 2] = lam;
  q[2 * 4 + 3] = lam;
  q[3 * 4 + 2] = lam;
  q[3 * 4 + 3] = lam;
  NumericSolution sol;
  sol.objective = lam;
  sol.q_matrices.push_back(std::move(q));
  return sol;
}

Certificate make_132_certificate(int k = 30) {
  auto prob = assemble(P("132"), 3, ForbiddenSet(), false);
  auto sol = known_132_solution();
  auto rounded = round_solution(sol, k);
  auto exact = exact_bound(prob, rounded.l_matrices);
  return make_certificate(prob, rounded, exact, k);
}

}  // namespace

TEST_CASE("rational matrix helpers") {
  RationalMatrix l(2);
  l.at(0, 0) = make_rational(1, 2);
  l.at(1, 0) = make_rational(-1, 3);
  l.at(1, 1) = make_rational(2, 1);
  CHECK(l.is_lower_triangular());
  CHECK(l.diagonal_nonnegative());
  auto q = l.gram();
  CHECK(q.at(0, 0) == make_rational(1, 4));
  CHECK(q.at(1, 0) == make_rational(-1, 6));
  CHECK(q.at(0, 1) == make_rational(-1, 6));
  CHECK(q.at(1, 1) == make_rational(1, 9) + 4);

  CHECK(parse_rational("2/3") == make_rational(2, 3));
  CHECK(parse_rational("-5") == -5);
  CHECK(rational_to_string(make_rational(2, 3)) == "2/3");
  CHECK(rational_to_string(Rational(1)) == "1");
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
}

TEST_CASE("dyadic rounding") {
  CHECK(round_to_dyadic(0.5, 10) == make_rational(1, 2));
  CHECK(round_to_dyadic(1.0 / 3, 2) == make_rational(1, 4));
  CHECK(round_to_dyadic(-0.3, 30).get_d() == doctest::Approx(-0.3).epsilon(1e-8));
}

TEST_CASE("rounding a zero matrix gives a zero factor") {
  NumericSolution sol;
  sol.q_matrices.push_back(std::vector<double>(9, 0.0));
  auto rounded = round_solution(sol, 20);
  REQUIRE(rounded.l_matrices.size() == 1);
  CHECK(rounded.l_matrices[0] == RationalMatrix(3));
  CHECK(rounded.epsilon_shift == 0);
}

TEST_CASE("rounding reproduces a PSD matrix entrywise") {
  // random-ish PSD matrix L0 L0^T
  int n = 5;
  std::vector<double> l0(n * n, 0.0);
  unsigned state = 12345;
  auto rnd = [&] {
    state = state * 1664525u + 1013904223u;
    return (state >> 8) / double(1 << 24) - 0.5;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) l0[i * n + j] = rnd();
    l0[i * n + i] = 1.0 + std::abs(rnd());
  }
  std::vector<double> q(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) q[i * n + j] += l0[i * n + k] * l0[j * n + k];

  NumericSolution sol;
  sol.q_matrices.push_back(q);
  int k = 20;
  auto rounded = round_solution(sol, k);
  auto qq = rounded.l_matrices[0].gram();
  double worst = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      worst = std::max(worst, std::abs(qq.at(i, j).get_d() - q[i * n + j]));
  CHECK(worst <= n * std::ldexp(1.0, -(k - 1)));
  CHECK(rounded.l_matrices[0].is_lower_triangular());
  CHECK(rounded.l_matrices[0].diagonal_nonnegative());
}

TEST_CASE("rounding rejects a clearly indefinite matrix") {
  NumericSolution sol;
  sol.q_matrices.push_back({0.0, 1.0, 1.0, 0.0});  // eigenvalues +-1
  CHECK_THROWS_AS(round_solution(sol, 20), CertifyError);
}

TEST_CASE("certified 132 bound lands just above the algebraic optimum") {
  auto cert = make_132_certificate();
  double lam = 2 * std::sqrt(3.0) - 3;
  CHECK(cert.bound.get_d() > lam - 1e-12);
  CHECK(cert.bound.get_d() < lam + 1e-6);
  // the optimum is attained by four targets; any of them may witness
  CHECK(std::find(cert.admissible.begin(), cert.admissible.end(), cert.witness) !=
        cert.admissible.end());

  auto rep = verify(cert);
  for (const auto& c : rep.checks) {
    INFO(c.name, " ", c.detail);
    CHECK(c.pass);
  }
  CHECK(rep.ok());
}

TEST_CASE("certificate json round trip") {
  auto cert = make_132_certificate();
  std::string text = certificate_to_json(cert);
  auto back = certificate_from_json(text);
  CHECK(back.pattern == cert.pattern);
  CHECK(back.n == cert.n);
  CHECK(back.admissible == cert.admissible);
  CHECK(back.l_matrices.size() == cert.l_matrices.size());
  CHECK(back.l_matrices[0] == cert.l_matrices[0]);
  CHECK(back.bound == cert.bound);
  CHECK(back.witness == cert.witness);
  CHECK(back.k == cert.k);
  CHECK(certificate_to_json(back) == text);

  // file round trip
  auto dir = std::filesystem::temp_directory_path() / "permflag-test";
  std::filesystem::create_directories(dir);
  auto path = (dir / "cert.json").string();
  write_certificate(cert, path);
  auto again = read_certificate(path);
  CHECK(certificate_to_json(again) == text);
}

TEST_CASE("unknown fields warn, malformed fields throw") {
  auto cert = make_132_certificate();
  auto j = nlohmann::json::parse(certificate_to_json(cert));
  j["future_extension"] = 42;
  std::vector<std::string> warnings;
  auto back = certificate_from_json(j.dump(), &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("future_extension") != std::string::npos);
  CHECK(back.bound == cert.bound);

  auto bad = j;
  bad.erase("bound");
  CHECK_THROWS_WITH_AS(certificate_from_json(bad.dump()), "missing field: bound", CertifyError);

  bad = j;
  bad["bound"] = "1/0";
  CHECK_THROWS_AS(certificate_from_json(bad.dump()), CertifyError);

  bad = j;
  bad["l_matrices"][0][0][0] = 5;  // number instead of "p/q"
  CHECK_THROWS_AS(certificate_from_json(bad.dump()), CertifyError);

  CHECK_THROWS_AS(certificate_from_json("not json"), CertifyError);
}

TEST_CASE("verifier rejects canonical tamperings") {
  auto cert = make_132_certificate();
  REQUIRE(verify(cert).ok());

  SUBCASE("negated diagonal entry") {
    auto bad = cert;
    bad.l_matrices[0].at(1, 1) = -bad.l_matrices[0].at(1, 1);
    auto rep = verify(bad);
    CHECK(!rep.ok());
  }
  SUBCASE("understated bound") {
    auto bad = cert;
    bad.bound -= make_rational(1, 1000);
    auto rep = verify(bad);
    CHECK(!rep.ok());
  }
  SUBCASE("missing admissible permutation") {
    auto bad = cert;
    bad.admissible.pop_back();
    auto rep = verify(bad);
    CHECK(!rep.ok());
  }
  SUBCASE("upper-triangular leak") {
    auto bad = cert;
    bad.l_matrices[0].at(0, 3) = make_rational(1, 7);
    auto rep = verify(bad);
    CHECK(!rep.ok());
  }
  SUBCASE("corrupted flag support") {
    auto bad = cert;
    bad.types[0].flags[0].second = {2};
    auto rep = verify(bad);
    CHECK(!rep.ok());
  }
  SUBCASE("foreign witness") {
    auto bad = cert;
    bad.witness = "999";
    auto rep = verify(bad);
    CHECK(!rep.ok());
  }
}

TEST_CASE("certificates are byte-stable across processes") {
  auto a = certificate_to_json(make_132_certificate());
  auto b = certificate_to_json(make_132_certificate());
  CHECK(a == b);
}
