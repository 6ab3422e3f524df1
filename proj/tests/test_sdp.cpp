#include <doctest.h>

#include <sstream>

#include "permflag/certify.hpp"
#include "permflag/sdp.hpp"

using namespace permflag;

namespace {
Permutation P(const char* s) { return Permutation::parse(s); }

// Rational stand-in for 2*sqrt(3)-3, good to ~1e-10; the checks below are
// linear in it, so they hold exactly for the stand-in itself.
const Rational kLambdaHat = make_rational(4641016151LL, 10000000000LL);
}

TEST_CASE("assemble shapes") {
  auto prob = assemble(P("132"), 3, ForbiddenSet(), false);
  CHECK(prob.admissible.size() == 6);
  REQUIRE(prob.tables.size() == 1);
  CHECK(prob.tables[0].flag_count() == 4);
  CHECK(prob.objective[1] == 1);  // p(132, 132)

  auto trivial = assemble(P("12"), 2, ForbiddenSet(), false);
  CHECK(trivial.admissible.size() == 2);
  REQUIRE(trivial.tables.size() == 1);
  CHECK(trivial.tables[0].type.t() == 0);
  CHECK(trivial.tables[0].flag_count() == 1);

  CHECK_THROWS_AS(assemble(P("132"), 2, ForbiddenSet(), false), std::invalid_argument);
  CHECK_THROWS_AS(assemble(P("2413"), 5, ForbiddenSet(), true), std::invalid_argument);
  CHECK_THROWS_AS(assemble(P("12"), 2, ForbiddenSet({P("1")}), false), std::invalid_argument);
}

TEST_CASE("assemble under a forbidden pattern") {
  auto prob = assemble(P("1342"), 6, ForbiddenSet({P("2431")}), false);
  CHECK(prob.admissible.size() == 512);
  for (const auto& tbl : prob.tables) CHECK(tbl.flag_count() > 0);
}

TEST_CASE("crude bounds") {
  CHECK(crude_bound(P("12"), 3, ForbiddenSet({P("123")})) == make_rational(2, 3));
  CHECK(crude_bound(P("132"), 3, ForbiddenSet()) == 1);
  CHECK(crude_bound(P("2413"), 4, ForbiddenSet()) == 1);

  // exhaustive max over the 120 hosts of length 5
  Rational best(0);
  for (const auto& p : enumerate(5, ForbiddenSet())) {
    Rational d = density(P("2413"), p);
    if (d > best) best = d;
  }
  CHECK(crude_bound(P("2413"), 5, ForbiddenSet()) == best);
  CHECK(best == make_rational(2, 5));
}

TEST_CASE("the hand-checkable Q matrix reproduces the known slack values") {
  // Q for the 132 problem at N=3 in this library's flag order
  // (12,{1}), (12,{2}), (21,{1}), (21,{2}).
  auto prob = assemble(P("132"), 3, ForbiddenSet(), false);
  const Rational lam = kLambdaHat;
  const Rational g = 3 * (lam - 1) / 2;
  RationalMatrix q(4);
  q.at(1, 1) = 3 * lam;
  q.at(1, 2) = g;
  q.at(2, 1) = g;
  q.at(1, 3) = g;
  q.at(3, 1) = g;
  q.at(2, 2) = lam;
  q.at(2, 3) = lam;
  q.at(3, 2) = lam;
  q.at(3, 3) = lam;

  auto alpha = [&](std::size_t pi) {
    Rational s(0);
    for (const auto& e : prob.tables[0].rows[pi])
      s += (e.i == e.j ? Rational(1) : Rational(2)) * q.at(e.i, e.j) * e.value;
    return s;
  };

  // admissible order: 123, 132, 213, 231, 312, 321
  CHECK(alpha(0) == lam);
  CHECK(alpha(1) == lam - 1);
  CHECK(alpha(2) == lam);
  CHECK(alpha(3) == (5 * lam - 3) / 6);
  CHECK(alpha(4) == (5 * lam - 3) / 6);
  CHECK(alpha(5) == lam);

  // slack values p(132, P') + alpha(P'): the density term is 1 for the
  // target 132 itself and 0 elsewhere, so four targets attain the bound
  for (std::size_t pi = 0; pi < 6; ++pi) {
    Rational total = prob.objective[pi] + alpha(pi);
    if (pi == 3 || pi == 4)
      CHECK(total == (5 * lam - 3) / 6);
    else
      CHECK(total == lam);
  }
}

TEST_CASE("sdpa emission") {
  auto prob = assemble(P("132"), 3, ForbiddenSet(), false);
  std::stringstream a, b;
  emit_sdpa(prob, a);
  emit_sdpa(prob, b);
  CHECK(a.str() == b.str());

  std::string line;
  std::stringstream s(a.str());
  std::getline(s, line);
  CHECK(line == "6");  // one constraint per admissible permutation
  std::getline(s, line);
  CHECK(line == "2");  // one type block + slack
  std::getline(s, line);
  CHECK(line == "4 -7");  // 4 flags, 6 slacks + normalization slot
  std::getline(s, line);
  CHECK(line.find("-1") != std::string::npos);  // -p(132,132) in the rhs

  auto trivial = assemble(P("12"), 2, ForbiddenSet(), false);
  std::stringstream t;
  emit_sdpa(trivial, t);
  std::getline(t, line);
  CHECK(line == "2");
}

TEST_CASE("exact bound with zero matrices is the crude bound") {
  auto prob = assemble(P("12"), 3, ForbiddenSet({P("123")}), false);
  std::vector<RationalMatrix> zeros;
  for (auto s : prob.block_sizes()) zeros.emplace_back(s);
  auto exact = exact_bound(prob, zeros);
  CHECK(exact.bound == make_rational(2, 3));
  CHECK(exact.bound == crude_bound(P("12"), 3, ForbiddenSet({P("123")})));

  RationalMatrix wrong(2);
  CHECK_THROWS_AS(exact_bound(prob, {wrong}), CertifyError);
}

TEST_CASE("layered assembly is the restriction to layered permutations") {
  auto prob = assemble(P("1324"), 5, ForbiddenSet(), true);
  CHECK(prob.admissible.size() == 16);
  for (const auto& p : prob.admissible) CHECK(p.is_layered());
  for (const auto& tbl : prob.tables)
    for (const auto& f : tbl.flags) CHECK(f.base.is_layered());
}
