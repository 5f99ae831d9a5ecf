#include "doctest.h"

#include "padicdyn/dichotomy.hpp"

using namespace padicdyn;

namespace {

PadicNumber em(const Prime& p, long a) {
  return PadicNumber::embed_rational(Rat(a), p);
}

}  // namespace

TEST_CASE("integer zero scan confirms exactly the roots below the bound") {
  Prime p5(5);
  // (w - 1)(w - 6) = w^2 - 7w + 6
  PadicSeries f = PadicSeries::monomial(em(p5, 1), 2) +
                  PadicSeries::monomial(em(p5, -7), 1) +
                  PadicSeries::constant(em(p5, 6));
  long probes = 0;
  auto scan = integer_zeros(f, 10, [&](long n) {
    ++probes;
    return Rat(n - 1) * Rat(n - 6) == Rat(0);
  });
  REQUIRE(scan.has_value());
  CHECK(scan->zeros == std::vector<long>{1, 6});
  CHECK(scan->exhaustive);
  CHECK(scan->verified_bound >= 10);
  CHECK(probes >= 2);
}

TEST_CASE("integer zero scan handles certified transcendental tails") {
  Prime p5(5);
  PadicSeries e5 = exp_series(PadicSeries::monomial(em(p5, 5), 1), 24) -
                   PadicSeries::constant(em(p5, 1));
  auto scan = integer_zeros(e5, 100, [](long n) { return n == 0; });
  REQUIRE(scan.has_value());
  CHECK(scan->zeros == std::vector<long>{0});
  CHECK(scan->exhaustive);
}

TEST_CASE("series with no closed-disk zeros close immediately") {
  Prime p5(5);
  PadicSeries g = PadicSeries::constant(em(p5, 1)) +
                  PadicSeries::monomial(em(p5, 5), 1);
  auto scan = integer_zeros(g, 50, [](long) { return false; });
  REQUIRE(scan.has_value());
  CHECK(scan->zeros.empty());
  CHECK(scan->exhaustive);
}

TEST_CASE("exceptions from the exact check propagate out of the scan") {
  Prime p5(5);
  PadicSeries f = PadicSeries::monomial(em(p5, 1), 1);  // zero at 0
  CHECK_THROWS_AS((void)integer_zeros(f, 10,
                                      [](long) -> bool {
                                        throw std::runtime_error("oracle down");
                                      }),
                  std::runtime_error);
}

TEST_CASE("vanish-or-finite decision counts capacity plus one confirmations") {
  Prime p5(5);
  // bounds [5, 6]: the hypothetical minimum sits at index 0, capacity 0
  PadicSeries z = PadicSeries::monomial(PadicNumber::inexact_zero(p5, 5), 0) +
                  PadicSeries::monomial(PadicNumber::inexact_zero(p5, 6), 1);
  REQUIRE(z.zero_to_precision());
  auto yes = decide_identically_zero(z, [](long) { return true; });
  REQUIRE(yes.has_value());
  CHECK(yes->identically_zero);
  CHECK(yes->probes == 1);
  CHECK(yes->capacity == 0);
  auto no = decide_identically_zero(z, [](long) { return false; });
  REQUIRE(no.has_value());
  CHECK(!no->identically_zero);
  CHECK(no->probes == 1);

  // bounds [6, 5]: minimum attained last at index 1, capacity 1
  PadicSeries z2 = PadicSeries::monomial(PadicNumber::inexact_zero(p5, 6), 0) +
                   PadicSeries::monomial(PadicNumber::inexact_zero(p5, 5), 1);
  auto mixed = decide_identically_zero(z2, [](long k) { return k < 1; });
  REQUIRE(mixed.has_value());
  CHECK(!mixed->identically_zero);
  CHECK(mixed->probes == 2);
  CHECK(mixed->capacity == 1);
  auto all = decide_identically_zero(z2, [](long) { return true; });
  REQUIRE(all.has_value());
  CHECK(all->identically_zero);
  CHECK(all->probes == 2);
}

TEST_CASE("exactly-zero series are decided with zero probes") {
  Prime p5(5);
  auto d = decide_identically_zero(PadicSeries::zero(p5),
                                   [](long) { return false; });
  REQUIRE(d.has_value());
  CHECK(d->identically_zero);
  CHECK(d->probes == 0);
  CHECK(d->capacity == -1);
}
