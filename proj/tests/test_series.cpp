#include <random>

#include "doctest.h"

#include "padicdyn/errors.hpp"
#include "padicdyn/series.hpp"

using namespace padicdyn;

namespace {

PadicNumber em(const Prime& p, long a, int prec = 30) {
  return PadicNumber::embed_rational(Rat(a), p, prec);
}

PadicSeries poly(const Prime& p, std::initializer_list<long> cs, int prec = 30) {
  std::vector<PadicNumber> v;
  for (long c : cs)
    v.push_back(c == 0 ? PadicNumber::exact_zero(p)
                       : PadicNumber::embed_rational(Rat(c), p, prec));
  return PadicSeries(p, std::move(v));
}

}  // namespace

TEST_CASE("polynomial composition: squaring after a shift") {
  Prime p3(3);
  auto f = poly(p3, {0, 0, 1}, 10);  // z^2
  auto g = poly(p3, {1, 1}, 10);     // 1 + z
  auto c = f.compose(g);
  CHECK(c.degree() == 2);
  CHECK(c.coeff(0).unit() == 1);
  CHECK(c.coeff(1).unit() == 2);
  CHECK(c.coeff(2).unit() == 1);
  CHECK(c.is_polynomial());
}

TEST_CASE("evaluation agrees with direct rational arithmetic") {
  std::mt19937_64 rng(41);
  Prime p5(5);
  std::uniform_int_distribution<long> coef(-20, 20);
  for (int t = 0; t < 50; ++t) {
    long a = coef(rng), b = coef(rng), c = coef(rng);
    auto f = poly(p5, {a, b, c}, 40);
    long x = 5 * coef(rng);
    Rat want = Rat(a) + Rat(b) * Rat(x) + Rat(c) * Rat(x) * Rat(x);
    auto got = f.evaluate(em(p5, x, 40));
    auto d = got - PadicNumber::embed_rational(want, p5, 40);
    CHECK(d.is_zero_like());
  }
}

TEST_CASE("series ring identities hold under evaluation") {
  Prime p7(7);
  auto f = poly(p7, {2, -3, 0, 1}, 40);
  auto g = poly(p7, {1, 4, 2}, 40);
  auto x = em(p7, 14, 40);
  auto lhs = (f + g).evaluate(x);
  CHECK((lhs - (f.evaluate(x) + g.evaluate(x))).is_zero_like());
  auto lhm = (f * g).evaluate(x);
  CHECK((lhm - f.evaluate(x) * g.evaluate(x)).is_zero_like());
  Rat gx = Rat(1) + Rat(4 * 14) + Rat(2 * 14 * 14);
  Rat want = Rat(2) - Rat(3) * gx + gx * gx * gx;
  CHECK((f.evaluate(g.evaluate(x)) - PadicNumber::embed_rational(want, p7, 40))
            .is_zero_like());
}

TEST_CASE("scaled argument multiplies coefficients by powers") {
  Prime p3(3);
  auto f = poly(p3, {1, 1, 1, 1}, 20);
  auto a = em(p3, 3, 20);
  auto g = f.scaled_argument(a);
  CHECK(g.coeff(0).unit() == 1);
  CHECK(g.coeff(1).valuation() == 1);
  CHECK(g.coeff(2).valuation() == 2);
  CHECK(g.coeff(3).valuation() == 3);
}

TEST_CASE("shift and truncate") {
  Prime p2(2);
  auto f = poly(p2, {1, 1}, 10);
  auto s = f.shifted(2);
  CHECK(s.degree() == 3);
  CHECK(s.coeff(0).is_zero_like());
  CHECK(s.coeff(2).unit() == 1);
  auto t = s.truncated(2);
  CHECK(t.degree() <= 2);
}

TEST_CASE("exp and log series invert each other coefficientwise") {
  Prime p3(3);
  auto z3 = PadicSeries::monomial(em(p3, 3, 30), 1);
  auto lg = log1p_series(z3, 12);
  auto ex = exp_series(lg, 12);
  CHECK(ex.coeff(0).unit() == 1);
  CHECK(ex.coeff(0).valuation() == 0);
  auto d1 = ex.coeff(1) - em(p3, 3, 30);
  CHECK(d1.is_zero_like());
  for (int n = 2; n <= 12; ++n) {
    CHECK(ex.coeff(n).is_zero_like());
    CHECK(ex.coeff(n).valuation_lower_bound() >= 30);
  }
  REQUIRE(ex.tail().has_value());
  CHECK(ex.tail()->vrho == Rat(1, 2));
}

TEST_CASE("tail certificates bound unseen coefficients") {
  Prime p5(5);
  std::vector<PadicNumber> cs{em(p5, 1, 20), em(p5, 5, 20)};
  PadicSeries f(p5, cs, TailCertificate{Rat(3), Rat(1, 2)});
  CHECK(!f.is_polynomial());
  auto b = f.coeff_bound(10);
  REQUIRE(b.has_value());
  CHECK(*b == Rat(3) + Rat(10) * Rat(1, 2));
  // envelope at the tail rate exists
  auto env = f.envelope(Rat(1, 2));
  CHECK(env.has_value());
}

TEST_CASE("evaluation of certified series needs a point inside the disk") {
  Prime p5(5);
  std::vector<PadicNumber> cs{em(p5, 1, 20)};
  PadicSeries f(p5, cs, TailCertificate{Rat(0), Rat(1)});
  // v(x) = 1 > 0: tail sum converges, value = 1 + error with v >= tail at n=1
  auto y = f.evaluate(em(p5, 5, 20));
  CHECK(y.unit() == 1);
  // v(x) = 0 violates convergence of a rate-1 tail only at the boundary;
  // rate + v(x) must stay positive, v(x) = 0 with rate 1 is fine
  auto z = f.evaluate(em(p5, 1, 20));
  CHECK(!z.is_zero_like());
  // a decaying-at-zero-rate tail cannot be evaluated at a unit
  PadicSeries g(p5, cs, TailCertificate{Rat(0), Rat(0)});
  CHECK_THROWS_AS((void)g.evaluate(em(p5, 1, 20)), error);
}

TEST_CASE("recentering matches direct evaluation") {
  Prime p3(3);
  auto f = poly(p3, {4, -2, 7, 1}, 40);
  auto c = em(p3, 2, 40);
  auto r = f.recentered(c, 1);  // series in w with x = 2 + 3w
  for (long w : {0L, 1L, 5L}) {
    auto lhs = r.evaluate(em(p3, w, 40));
    auto rhs = f.evaluate(c + em(p3, 3 * w, 40));
    CHECK((lhs - rhs).is_zero_like());
  }
}

TEST_CASE("zero_to_precision distinguishes certified zero from small") {
  Prime p2(2);
  std::vector<PadicNumber> cs{PadicNumber::inexact_zero(p2, 12),
                              PadicNumber::inexact_zero(p2, 9)};
  PadicSeries f(p2, cs);
  CHECK(f.zero_to_precision());
  auto g = f + poly(p2, {0, 1}, 10);
  CHECK(!g.zero_to_precision());
}
