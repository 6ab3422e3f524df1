#include <doctest.h>

#include <algorithm>

#include "oracles.hpp"
#include "permflag/perm.hpp"

using namespace permflag;

namespace {
Permutation P(const char* s) { return Permutation::parse(s); }
}

TEST_CASE("pattern occurrence counting") {
  CHECK(count_occurrences(P("12"), P("132")) == 2);
  CHECK(count_occurrences(P("123"), P("123")) == 1);
  CHECK(count_occurrences(P("132"), P("1324")) == 1);
  CHECK(count_occurrences(P(""), P("4321")) == 1);
  CHECK(count_occurrences(P("12345"), P("1234")) == 0);
}

TEST_CASE("counting agrees with the recursive oracle") {
  auto perms5 = enumerate(5, ForbiddenSet());
  for (const auto& s : enumerate(3, ForbiddenSet()))
    for (std::size_t i = 0; i < perms5.size(); i += 7)
      CHECK(count_occurrences(s, perms5[i]) == oracle::count_occurrences(s, perms5[i]));
}

TEST_CASE("density") {
  CHECK(density(P("12"), P("132")) == make_rational(2, 3));
  CHECK(density(P("1"), P("54321")) == 1);
  CHECK(density(P("21"), P("2413")) == make_rational(1, 2));
  CHECK(density(P("123"), P("21")) == 0);
}

TEST_CASE("enumeration") {
  CHECK(enumerate(3, ForbiddenSet()).size() == 6);
  auto empty = enumerate(0, ForbiddenSet());
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].size() == 0);
  CHECK(enumerate(3, ForbiddenSet({P("123")})).size() == 5);

  // lexicographic one-line order
  auto p3 = enumerate(3, ForbiddenSet());
  CHECK(p3.front() == P("123"));
  CHECK(p3.back() == P("321"));
  CHECK(std::is_sorted(p3.begin(), p3.end()));
}

TEST_CASE("factorial counts up to 7") {
  long f = 1;
  for (int n = 1; n <= 7; ++n) {
    f *= n;
    CHECK(static_cast<long>(enumerate(n, ForbiddenSet()).size()) == f);
  }
}

TEST_CASE("avoidance counts for 2431 match the 1342 class") {
  // reverse maps Av(2431) onto Av(1342)
  const long expect[] = {1, 2, 6, 23, 103, 512};
  ForbiddenSet f({P("2431")});
  for (int n = 1; n <= 6; ++n) {
    auto perms = enumerate(n, f);
    CHECK(static_cast<long>(perms.size()) == expect[n - 1]);
    for (const auto& p : perms) CHECK(!p.contains(P("2431")));
  }
}

TEST_CASE("subpattern") {
  CHECK(P("1324").subpattern({1, 2, 3}) == P("132"));
  CHECK(P("1324").subpattern({1, 2, 3, 4}) == P("1324"));
  CHECK(P("321465987").subpattern({1, 2, 3, 4}) == P("3214"));
  CHECK_THROWS_AS(P("123").subpattern({2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(P("123").subpattern({0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(P("123").subpattern({4}), std::invalid_argument);
}

TEST_CASE("layered recognition and profiles") {
  CHECK(P("321465987").is_layered());
  CHECK(!P("2413").is_layered());
  CHECK(P("1").is_layered());
  CHECK(P("").is_layered());
  CHECK(!P("231").is_layered());

  CHECK(P("321465987").layer_profile() == std::vector<int>{3, 1, 2, 3});
  CHECK(P("123").layer_profile() == std::vector<int>{1, 1, 1});
  CHECK(P("4321").layer_profile() == std::vector<int>{4});
  CHECK_THROWS_AS(P("2413").layer_profile(), std::invalid_argument);

  CHECK(Permutation::from_layers({3, 1, 2, 3}) == P("321465987"));
}

TEST_CASE("layered enumeration agrees with filtering") {
  for (int n = 1; n <= 6; ++n) {
    auto direct = enumerate(n, ForbiddenSet(), true);
    std::vector<Permutation> filtered;
    for (const auto& p : enumerate(n, ForbiddenSet()))
      if (p.is_layered()) filtered.push_back(p);
    CHECK(direct == filtered);
    CHECK(direct.size() == (1u << (n - 1)));
  }
}

TEST_CASE("forbidden set canonicalization") {
  // 12345 contains 123, so it is redundant
  ForbiddenSet f({P("12345"), P("123")});
  REQUIRE(f.patterns().size() == 1);
  CHECK(f.patterns()[0] == P("123"));

  ForbiddenSet g({P("132"), P("132"), P("213")});
  CHECK(g.patterns().size() == 2);

  ForbiddenSet same1({P("123"), P("1234")});
  ForbiddenSet same2({P("123")});
  CHECK(same1 == same2);
}

TEST_CASE("partition identity") {
  auto hosts = enumerate(6, ForbiddenSet());
  for (int m = 1; m <= 6; ++m) {
    auto pats = enumerate(m, ForbiddenSet());
    for (std::size_t h = 0; h < hosts.size(); h += 13) {
      Rational sum(0);
      for (const auto& s : pats) sum += density(s, hosts[h]);
      CHECK(sum == 1);
    }
  }
}

TEST_CASE("hereditary admissibility") {
  ForbiddenSet f({P("132")});
  std::vector<std::vector<int>> subs;
  for (const auto& p : enumerate(5, f)) {
    subs.clear();
    oracle::subsets(5, 3, subs);
    for (const auto& I : subs) CHECK(f.allows(p.subpattern(I)));
  }
}

TEST_CASE("max density is non-increasing in the host length") {
  for (const char* pat : {"132", "2413"}) {
    Permutation s = P(pat);
    Rational prev(1);
    for (int n = s.size(); n <= 6; ++n) {
      Rational best(0);
      for (const auto& p : enumerate(n, ForbiddenSet())) {
        Rational d = density(s, p);
        if (d > best) best = d;
      }
      CHECK(best <= prev);
      prev = best;
    }
  }
}

TEST_CASE("counting is invariant under reverse-complement symmetry") {
  auto p6 = enumerate(6, ForbiddenSet());
  auto pats = enumerate(3, ForbiddenSet());
  for (std::size_t i = 0; i < p6.size(); i += 37) {
    for (const auto& s : pats) {
      CHECK(count_occurrences(s, p6[i]) == count_occurrences(s.reverse(), p6[i].reverse()));
      CHECK(count_occurrences(s, p6[i]) == count_occurrences(s.complement(), p6[i].complement()));
      CHECK(count_occurrences(s, p6[i]) == count_occurrences(s.inverse(), p6[i].inverse()));
    }
  }
}

TEST_CASE("serialization") {
  CHECK(P("1324").to_string() == "1324");
  CHECK(P("").to_string() == "");
  Permutation big = Permutation::identity(11);
  CHECK(Permutation::parse(big.to_string()) == big);
  CHECK(big.to_string() == "1,2,3,4,5,6,7,8,9,10,11");
  CHECK_THROWS_AS(Permutation::parse("10"), std::invalid_argument);  // digit 0
  CHECK_THROWS_AS(Permutation::parse("122"), std::invalid_argument);
  CHECK_THROWS_AS(Permutation::parse("13"), std::invalid_argument);  // not onto {1,2}
}
