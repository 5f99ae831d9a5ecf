#include <random>

#include "doctest.h"

#include "padicdyn/errors.hpp"
#include "padicdyn/padic.hpp"
#include "padicdyn/polynomial.hpp"

using namespace padicdyn;

namespace {

Rat random_rat(std::mt19937_64& rng, uint64_t avoid_den_p) {
  std::uniform_int_distribution<long> num(-999, 999);
  std::uniform_int_distribution<long> den(1, 999);
  long d = den(rng);
  while (d % (long)avoid_den_p == 0) d = den(rng);
  Rat r(num(rng), d);
  r.canonicalize();
  return r;
}

}  // namespace

TEST_CASE("rational embedding produces the unit-times-power normal form") {
  Prime p3(3);
  auto x = PadicNumber::embed_rational(Rat(9, 2), p3, 5);
  CHECK(x.valuation() == 2);
  CHECK(x.unit() == 122);  // inverse of 2 mod 3^5
  CHECK(x.relative_precision() == 5);

  auto half = PadicNumber::embed_rational(Rat(1), p3, 4) /
              PadicNumber::embed_rational(Rat(2), p3, 4);
  CHECK(half.valuation() == 0);
  CHECK(half.unit() == 41);
}

TEST_CASE("negative valuations embed; mod-p reduction guards denominators") {
  Prime p3(3);
  auto third = PadicNumber::embed_rational(Rat(1, 3), p3, 8);
  CHECK(third.valuation() == -1);
  CHECK(third.unit() == 1);
  auto x = PadicNumber::embed_rational(Rat(5, 6), p3, 8);
  CHECK(x.valuation() == -1);
  CHECK((x.unit() * 2 - 5) % 6561 == 0);
  try {
    (void)UniPolyQ(std::vector<Rat>{Rat(1, 3), Rat(1)}).mod_p(p3);
    FAIL("expected a throw");
  } catch (const error& e) {
    CHECK(e.code() == errc::denominator_divisible_by_p);
  }
}

TEST_CASE("zero forms: exact, inexact, and indeterminate valuation") {
  Prime p5(5);
  auto ez = PadicNumber::exact_zero(p5);
  CHECK(ez.is_exact_zero());
  CHECK(ez.is_zero_like());
  CHECK(ez.valuation_lower_bound() == kAbsPrecInf);
  CHECK_THROWS_AS((void)ez.valuation(), error);

  auto iz = PadicNumber::inexact_zero(p5, 7);
  CHECK(iz.is_inexact_zero());
  CHECK(iz.valuation_lower_bound() == 7);
  CHECK_THROWS_AS((void)iz.valuation(), error);

  auto one = PadicNumber::one(p5, 10);
  CHECK_THROWS_AS((void)(one / iz), error);
}

TEST_CASE("division by any zero-like value throws") {
  Prime p5(5);
  auto one = PadicNumber::one(p5, 10);
  CHECK_THROWS_AS((void)(one / PadicNumber::exact_zero(p5)), error);
  CHECK_THROWS_AS((void)(one / PadicNumber::inexact_zero(p5, 3)), error);
}

TEST_CASE("cancellation in addition is tracked, not hidden") {
  Prime p3(3);
  auto a = PadicNumber::from_unit(p3, 0, Int(1), 5);
  auto b = PadicNumber::from_unit(p3, 0, Int(2), 5);
  auto s = a + b;
  CHECK(s.to_string() == "1*3^1 + O(3^5)");
  CHECK(s.valuation() == 1);
  CHECK(s.abs_precision() == 5);

  // full cancellation: 1 - 1 with N digits leaves an inexact zero of bound N
  auto z = a - a;
  CHECK(z.is_inexact_zero());
  CHECK(z.valuation_lower_bound() == 5);
}

TEST_CASE("field operations agree with exact rational arithmetic") {
  std::mt19937_64 rng(20260816);
  const uint64_t primes[] = {2, 3, 5, 7};
  for (uint64_t pv : primes) {
    Prime p(pv);
    for (int t = 0; t < 250; ++t) {
      Rat a = random_rat(rng, pv);
      Rat b = random_rat(rng, pv);
      auto ea = PadicNumber::embed_rational(a, p, 64);
      auto eb = PadicNumber::embed_rational(b, p, 64);

      long va = a == 0 ? 1000 : *rat_valuation(a, Int((unsigned long)pv));
      long vb = b == 0 ? 1000 : *rat_valuation(b, Int((unsigned long)pv));
      long floor_ab = std::min(va, vb) + 64;

      auto ds = (ea + eb) - PadicNumber::embed_rational(a + b, p, 64);
      CHECK(ds.is_zero_like());
      CHECK(ds.valuation_lower_bound() >= floor_ab);

      auto dd = (ea - eb) - PadicNumber::embed_rational(a - b, p, 64);
      CHECK(dd.is_zero_like());
      CHECK(dd.valuation_lower_bound() >= floor_ab);

      if (a != 0 && b != 0) {
        auto dm = ea * eb - PadicNumber::embed_rational(a * b, p, 64);
        CHECK(dm.is_zero_like());
        CHECK(dm.valuation_lower_bound() >= va + vb + 64);

        auto dq = ea / eb - PadicNumber::embed_rational(a / b, p, 64);
        CHECK(dq.is_zero_like());
        CHECK(dq.valuation_lower_bound() >= va - vb + 64);

        // valuation is additive
        CHECK((ea * eb).valuation() == va + vb);
      }
    }
  }
}

TEST_CASE("ultrametric inequality for sums") {
  std::mt19937_64 rng(7);
  Prime p5(5);
  for (int t = 0; t < 200; ++t) {
    Rat a = random_rat(rng, 5);
    Rat b = random_rat(rng, 5);
    if (a == 0 || b == 0 || a + b == 0) continue;
    auto s = PadicNumber::embed_rational(a, p5, 64) +
             PadicNumber::embed_rational(b, p5, 64);
    long va = *rat_valuation(a, Int(5));
    long vb = *rat_valuation(b, Int(5));
    CHECK(s.valuation() >= std::min(va, vb));
    if (va != vb) CHECK(s.valuation() == std::min(va, vb));
  }
}

TEST_CASE("precision refinement is monotone: shrinking precision never changes digits") {
  Prime p7(7);
  auto x = PadicNumber::embed_rational(Rat(22, 5), p7, 40);
  auto y = x.with_relative_precision(12);
  CHECK(y.relative_precision() == 12);
  auto d = x - y;
  CHECK(d.is_zero_like());
  CHECK(d.valuation_lower_bound() >= y.abs_precision());

  auto z = x.with_abs_precision(9);
  CHECK(z.abs_precision() == 9);
  CHECK((x - z).valuation_lower_bound() >= 9);
}

TEST_CASE("teichmuller lifts have the expected order and digits") {
  Prime p5(5);
  auto u2 = PadicNumber::embed_rational(Rat(2), p5, 8);
  CHECK(teichmuller_order(u2) == 4);
  auto t = teichmuller_lift(p5, Int(2), 8);
  CHECK(t.unit() == 280182);
  auto pw = padic_pow(t, 4) - PadicNumber::one(p5, 8);
  CHECK(pw.is_zero_like());
  CHECK(pw.valuation_lower_bound() >= 8);
}

TEST_CASE("exp and log round-trip on their domains") {
  Prime p3(3), p2(2);
  auto y = PadicNumber::embed_rational(Rat(13), p3, 20);
  auto ly = log_p(y);
  CHECK(ly.valuation() == 1);
  CHECK(ly.unit() == 615267154);
  auto ey = exp_p(ly);
  auto d = ey - y;
  CHECK(d.is_zero_like());
  CHECK(d.valuation_lower_bound() >= 20);

  // exp at p=2 needs v > 1
  CHECK_THROWS_AS((void)exp_p(PadicNumber::embed_rational(Rat(2), p2, 10)), error);
  try {
    (void)exp_p(PadicNumber::embed_rational(Rat(2), p2, 10));
  } catch (const error& e) {
    CHECK(e.code() == errc::outside_exp_domain);
  }
  auto e4 = exp_p(PadicNumber::embed_rational(Rat(4), p2, 16));
  CHECK(e4.valuation() == 0);
  CHECK(e4.unit() == 147789);
  auto l4 = log_p(e4) - PadicNumber::embed_rational(Rat(4), p2, 16);
  CHECK(l4.is_zero_like());
  CHECK(l4.valuation_lower_bound() >= 18);
}

TEST_CASE("log is a homomorphism on principal units") {
  std::mt19937_64 rng(99);
  Prime p7(7);
  std::uniform_int_distribution<long> small(1, 300);
  for (int t = 0; t < 50; ++t) {
    // x, y = 1 + 7 * (unit), principal units
    Rat x = Rat(1) + Rat(7 * small(rng), 1 + 7 * small(rng));
    Rat y = Rat(1) + Rat(7 * small(rng), 1 + 7 * small(rng));
    auto ex = PadicNumber::embed_rational(x, p7, 48);
    auto ey = PadicNumber::embed_rational(y, p7, 48);
    auto d = log_p(ex * ey) - (log_p(ex) + log_p(ey));
    CHECK(d.is_zero_like());
    CHECK(d.valuation_lower_bound() >= 45);
  }
}

TEST_CASE("to_string round-trips the display form") {
  Prime p2(2);
  auto x = PadicNumber::embed_rational(Rat(12), p2, 6);
  CHECK(x.to_string() == "3*2^2 + O(2^8)");
  CHECK(PadicNumber::exact_zero(p2).to_string() == "0 (certified)");
  CHECK(PadicNumber::inexact_zero(p2, 4).to_string() == "O(2^4)");
}
