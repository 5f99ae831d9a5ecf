#include <algorithm>
#include <random>

#include "doctest.h"

#include "padicdyn/errors.hpp"
#include "padicdyn/newton.hpp"
#include "padicdyn/polynomial.hpp"

using namespace padicdyn;

namespace {

PadicNumber em(const Prime& p, long a) {
  return PadicNumber::embed_rational(Rat(a), p, 64);
}

PadicSeries from_unipoly(const UniPolyQ& f, const Prime& p) {
  std::vector<PadicNumber> cs;
  for (int n = 0; n <= f.degree(); ++n)
    cs.push_back(f.coeff(n) == 0 ? PadicNumber::exact_zero(p)
                                 : PadicNumber::embed_rational(f.coeff(n), p, 64));
  return PadicSeries(p, std::move(cs));
}

}  // namespace

TEST_CASE("ramified quadratic gives one segment of slope one half") {
  Prime p5(5);
  PadicSeries f(p5, {em(p5, -5), PadicNumber::exact_zero(p5), em(p5, 1)});
  auto np = polygon(f);
  REQUIRE(np.segments.size() == 1);
  CHECK(np.segments[0].slope == Rat(1, 2));
  CHECK(np.segments[0].length == 2);
  CHECK(!np.certified_min_slope.has_value());
}

TEST_CASE("unit root plus steep factor separates segments") {
  Prime p3(3);
  PadicSeries f(p3, {PadicNumber::exact_zero(p3), em(p3, 1), em(p3, 3)});
  auto np = polygon(f);
  // z + 3z^2 = z(1 + 3z): one finite-slope root of valuation -1
  REQUIRE(np.segments.size() == 1);
  CHECK(np.segments[0].slope == Rat(-1));
  CHECK(np.segments[0].length == 1);
  auto sb = strassman(f);
  CHECK(sb.T == 1);
  CHECK(sb.min_valuation == 0);
}

TEST_CASE("constants have no roots and no segments") {
  Prime p5(5);
  PadicSeries f(p5, {em(p5, 1)});
  CHECK(polygon(f).segments.empty());
}

TEST_CASE("strassman counts closed-disk zeros") {
  Prime p5(5);
  PadicSeries f(p5, {em(p5, 1), em(p5, 1), em(p5, 1)});
  CHECK(strassman(f).T == 2);
}

TEST_CASE("orbit index candidates are the divisible nonnegative slopes") {
  Prime p5(5);
  // roots of valuation 2 and 5 against v(lambda) = 1: k in {2, 5}
  PadicSeries f(p5, {em(p5, 78125), em(p5, -(25 + 3125)), em(p5, 1)});
  auto ks = candidate_orbit_indices(f, em(p5, 5));
  CHECK(ks == std::vector<long>{2, 5});
  // root valuation 3 against v(lambda) = 2: 3/2 is not an integer
  PadicSeries g(p5, {em(p5, -125), em(p5, 1)});
  CHECK(candidate_orbit_indices(g, em(p5, 25)).empty());
}

TEST_CASE("certified tails truncate the polygon at the certified slope") {
  Prime p5(5);
  PadicSeries f(p5, {em(p5, 1), em(p5, 5)}, TailCertificate{Rat(2), Rat(1)});
  auto np = polygon(f);
  REQUIRE(np.segments.size() == 1);
  CHECK(np.segments[0].slope == Rat(-1));
  REQUIRE(np.certified_min_slope.has_value());
  CHECK(*np.certified_min_slope == Rat(0));
}

TEST_CASE("precision failures are reported, never guessed") {
  Prime p5(5);
  // flat tail reaches the hull minimum
  PadicSeries f8(p5, {em(p5, 1), em(p5, 5)}, TailCertificate{Rat(0), Rat(0)});
  CHECK_THROWS_AS((void)polygon(f8), error);
  try {
    (void)polygon(f8);
  } catch (const error& e) {
    CHECK(e.code() == errc::insufficient_precision);
  }
  // an inexact zero below the hull cannot be classified
  PadicSeries f9(p5, {em(p5, 1), PadicNumber::inexact_zero(p5, -1), em(p5, 1)});
  CHECK_THROWS_AS((void)polygon(f9), error);
  // the same bound above the hull is harmless
  PadicSeries f10(p5, {em(p5, 1), PadicNumber::inexact_zero(p5, 3), em(p5, 1)});
  auto np = polygon(f10);
  REQUIRE(np.segments.size() == 1);
  CHECK(np.segments[0].slope == Rat(0));
  CHECK(np.segments[0].length == 2);
  CHECK(!np.certified_min_slope.has_value());
}

TEST_CASE("hypothetical capacity bounds zero-to-precision series") {
  Prime p5(5);
  PadicSeries f(p5,
                {PadicNumber::exact_zero(p5), PadicNumber::inexact_zero(p5, 30),
                 PadicNumber::inexact_zero(p5, 30)},
                TailCertificate{Rat(28), Rat(1)});
  auto ht = hypothetical_strassman_T(f);
  REQUIRE(ht.has_value());
  CHECK(*ht == 2);
  PadicSeries z(p5, {PadicNumber::exact_zero(p5)});
  CHECK(*hypothetical_strassman_T(z) == -1);
}

TEST_CASE("segments match root valuations of a known factorization") {
  std::mt19937_64 rng(20260401);
  const uint64_t primes[] = {2, 3, 5, 7};
  std::uniform_int_distribution<int> nfac(1, 4);
  std::uniform_int_distribution<int> vdist(-2, 3);
  std::uniform_int_distribution<long> udist(1, 40);
  for (int trial = 0; trial < 40; ++trial) {
    Prime p(primes[(size_t)(trial % 4)]);
    long pv = (long)p.value();
    int k = nfac(rng);
    // f = prod (z - u * p^v) with u a unit; root valuations are the v's
    std::vector<Rat> want;
    UniPolyQ f = parse_unipoly("1");
    for (int i = 0; i < k; ++i) {
      int v = vdist(rng);
      long u = udist(rng);
      while (u % pv == 0) u = udist(rng);
      Rat root = Rat(u);
      for (int j = 0; j < std::abs(v); ++j) {
        if (v > 0)
          root *= Rat(pv);
        else
          root /= Rat(pv);
      }
      want.push_back(Rat(v));
      f = f * (UniPolyQ::variable() - UniPolyQ::constant(root));
    }
    std::sort(want.begin(), want.end());
    auto np = polygon(from_unipoly(f, p));
    std::vector<Rat> got;
    for (const auto& s : np.segments)
      for (long j = 0; j < s.length; ++j) got.push_back(s.slope);
    std::sort(got.begin(), got.end());
    CHECK(got == want);
  }
}
