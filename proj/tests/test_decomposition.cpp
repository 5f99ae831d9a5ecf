#include "doctest.h"

#include "padicdyn/decomposition.hpp"

using namespace padicdyn;

namespace {

ReturnSetDecomposition canon(std::vector<Progression> ps, std::vector<long> exc) {
  return canonicalize(std::move(ps), std::move(exc));
}

}  // namespace

TEST_CASE("full residue coverage collapses to the trivial progression") {
  auto d = canon({{0, 4}, {1, 4}, {2, 4}, {3, 4}}, {});
  CHECK(d.to_string() == "{0 + 1N} [rigorous]");
  REQUIRE(d.progressions.size() == 1);
  CHECK(d.progressions[0].start == 0);
  CHECK(d.progressions[0].modulus == 1);
}

TEST_CASE("same-parity classes merge to a smaller modulus") {
  auto d = canon({{0, 4}, {2, 4}}, {});
  CHECK(d.to_string() == "{0 + 2N} [rigorous]");
}

TEST_CASE("adjacent exceptional members are absorbed into the progression") {
  auto d = canon({{5, 2}}, {1, 3});
  CHECK(d.to_string() == "{1 + 2N} [rigorous]");
  auto e = canon({{5, 2}}, {1});
  CHECK(e.to_string() == "{5 + 2N, 1} [rigorous]");
}

TEST_CASE("contained progressions deduplicate") {
  auto d = canon({{0, 2}, {0, 4}}, {});
  CHECK(d.to_string() == "{0 + 2N} [rigorous]");
}

TEST_CASE("covered exceptional indices are dropped") {
  auto d = canon({{0, 2}, {1, 4}}, {4, 9});
  CHECK(d.to_string() == "{0 + 2N, 1 + 4N} [rigorous]");
}

TEST_CASE("duplicates among exceptional indices are removed and sorted") {
  auto d = canon({}, {3, 1, 1});
  CHECK(d.to_string() == "{1, 3} [rigorous]");
  CHECK(d.exceptional == std::vector<long>{1, 3});
}

TEST_CASE("membership answers match the canonical description") {
  auto d = canon({{5, 2}}, {1});
  CHECK(d.member(1));
  CHECK(!d.member(3));
  CHECK(d.member(7));
  CHECK(!d.member(2));
  CHECK(d.member(5));
  CHECK(!d.member(0));
}

TEST_CASE("window bitmaps agree with pointwise membership") {
  auto d = canon({{2, 3}, {7, 6}}, {0, 4});
  auto w = d.window(60);
  REQUIRE((long)w.size() == 60);
  for (long n = 0; n < 60; ++n) CHECK((bool)w[(size_t)n] == d.member(n));
}

TEST_CASE("set equality is insensitive to the presentation") {
  auto a = canon({{0, 4}, {2, 4}}, {});
  auto b = canon({{0, 2}}, {});
  CHECK(a.same_set(b));
  auto c = canon({{0, 2}}, {1});
  CHECK(!a.same_set(c));
}

TEST_CASE("disjointness: no index is described twice after canonicalization") {
  auto d = canon({{0, 2}, {0, 3}, {5, 6}, {1, 4}}, {2, 11, 30});
  long lcm = 12;
  // count how many descriptors claim each residue far beyond the prefix
  for (long n = 200; n < 200 + 2 * lcm; ++n) {
    int claims = 0;
    for (const auto& p : d.progressions)
      if (n >= p.start && (n - p.start) % p.modulus == 0) ++claims;
    for (long e : d.exceptional)
      if (e == n) ++claims;
    CHECK(claims <= 1);
  }
}
