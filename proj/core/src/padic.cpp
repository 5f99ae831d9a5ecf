#include "padicdyn/padic.hpp"

#include <algorithm>

namespace padicdyn {

namespace {

void check_same_prime(const PadicNumber& x, const PadicNumber& y) {
  if (x.p() != y.p())
    fail(errc::incompatible_prime,
         "mixed primes " + std::to_string(x.p()) + " and " + std::to_string(y.p()));
}

} // namespace

PadicNumber PadicNumber::exact_zero(const Prime& p) {
  return PadicNumber(p, Kind::ExactZero, 0, Int(0), 0);
}

PadicNumber PadicNumber::inexact_zero(const Prime& p, long bound) {
  return PadicNumber(p, Kind::InexactZero, bound, Int(0), 0);
}

PadicNumber PadicNumber::from_unit(const Prime& p, long v, Int unit, int prec) {
  if (prec <= 0) fail(errc::precision_exhausted, "nonpositive relative precision");
  Int mod = prime_power(p.value(), (unsigned long)prec);
  unit = positive_mod(unit, mod);
  if (unit == 0) return inexact_zero(p, v + prec);
  if (mpz_divisible_ui_p(unit.get_mpz_t(), p.value()))
    fail(errc::not_a_unit, "unit part divisible by p");
  return PadicNumber(p, Kind::Unit, v, std::move(unit), prec);
}

PadicNumber PadicNumber::one(const Prime& p, int prec) { return from_unit(p, 0, Int(1), prec); }

PadicNumber PadicNumber::embed_rational(const Rat& a, const Prime& p, int prec) {
  if (a == 0) return exact_zero(p);
  Int pp((unsigned long)p.value());
  Int num = a.get_num(), den = a.get_den();
  long v = int_valuation(num, pp) - int_valuation(den, pp);
  Int rest;
  mpz_remove(rest.get_mpz_t(), num.get_mpz_t(), pp.get_mpz_t());
  num = rest;
  mpz_remove(rest.get_mpz_t(), den.get_mpz_t(), pp.get_mpz_t());
  den = rest;
  Int mod = prime_power(p.value(), (unsigned long)prec);
  Int u = positive_mod(num, mod) * mod_inverse(positive_mod(den, mod), mod) % mod;
  return from_unit(p, v, u, prec);
}

long PadicNumber::valuation() const {
  if (kind_ == Kind::Unit) return val_;
  if (kind_ == Kind::ExactZero)
    fail(errc::indeterminate_valuation, "certified zero has valuation +inf");
  fail(errc::indeterminate_valuation,
       "inexact zero O(p^" + std::to_string(val_) + ") has no exact valuation");
}

long PadicNumber::valuation_lower_bound() const noexcept {
  if (kind_ == Kind::ExactZero) return kAbsPrecInf;
  return val_;
}

int PadicNumber::relative_precision() const {
  if (kind_ != Kind::Unit) fail(errc::indeterminate_valuation, "zero has no relative precision");
  return prec_;
}

long PadicNumber::abs_precision() const noexcept {
  switch (kind_) {
    case Kind::ExactZero: return kAbsPrecInf;
    case Kind::InexactZero: return val_;
    case Kind::Unit: return val_ + prec_;
  }
  return 0;
}

const Int& PadicNumber::unit() const {
  if (kind_ != Kind::Unit) fail(errc::indeterminate_valuation, "zero has no unit part");
  return unit_;
}

PadicNumber PadicNumber::with_abs_precision(long a) const {
  switch (kind_) {
    case Kind::ExactZero: return *this;
    case Kind::InexactZero: return inexact_zero(p_, std::min(val_, a));
    case Kind::Unit: {
      if (a <= val_) return inexact_zero(p_, a);
      long n = std::min<long>(prec_, a - val_);
      return from_unit(p_, val_, unit_, (int)n);
    }
  }
  return *this;
}

PadicNumber PadicNumber::with_relative_precision(int n) const {
  if (kind_ != Kind::Unit) return *this;
  return from_unit(p_, val_, unit_, std::min(n, prec_));
}

PadicNumber operator+(const PadicNumber& x, const PadicNumber& y) {
  check_same_prime(x, y);
  using K = PadicNumber::Kind;
  const Prime& p = x.prime();
  if (x.kind() == K::ExactZero) return y;
  if (y.kind() == K::ExactZero) return x;
  if (x.kind() == K::InexactZero && y.kind() == K::InexactZero)
    return PadicNumber::inexact_zero(p, std::min(x.valuation_lower_bound(), y.valuation_lower_bound()));
  if (x.kind() == K::InexactZero || y.kind() == K::InexactZero) {
    const PadicNumber& z = x.kind() == K::InexactZero ? x : y;
    const PadicNumber& u = x.kind() == K::InexactZero ? y : x;
    long m = z.valuation_lower_bound();
    if (u.valuation() >= m) return PadicNumber::inexact_zero(p, m);
    long n = std::min<long>(u.relative_precision(), m - u.valuation());
    return PadicNumber::from_unit(p, u.valuation(), u.unit(), (int)n);
  }
  long v1 = x.valuation(), v2 = y.valuation();
  if (v1 > v2) return y + x;
  long a = std::min(x.abs_precision(), y.abs_precision());
  if (v1 < v2) {
    long n = a - v1;
    Int mod = prime_power(p.value(), (unsigned long)n);
    Int u = x.unit() + y.unit() * prime_power(p.value(), (unsigned long)(v2 - v1));
    return PadicNumber::from_unit(p, v1, positive_mod(u, mod), (int)n);
  }
  long n = a - v1;
  Int mod = prime_power(p.value(), (unsigned long)n);
  Int s = positive_mod(x.unit() + y.unit(), mod);
  if (s == 0) return PadicNumber::inexact_zero(p, a);
  Int pp((unsigned long)p.value());
  long t = int_valuation(s, pp);
  if (t >= n) return PadicNumber::inexact_zero(p, a);
  Int rest;
  mpz_remove(rest.get_mpz_t(), s.get_mpz_t(), pp.get_mpz_t());
  return PadicNumber::from_unit(p, v1 + t, rest, (int)(n - t));
}

PadicNumber PadicNumber::operator-() const {
  if (kind_ != Kind::Unit) return *this;
  Int mod = prime_power(p_.value(), (unsigned long)prec_);
  return from_unit(p_, val_, mod - unit_, prec_);
}

PadicNumber operator-(const PadicNumber& x, const PadicNumber& y) { return x + (-y); }

PadicNumber operator*(const PadicNumber& x, const PadicNumber& y) {
  check_same_prime(x, y);
  using K = PadicNumber::Kind;
  const Prime& p = x.prime();
  if (x.kind() == K::ExactZero || y.kind() == K::ExactZero) return PadicNumber::exact_zero(p);
  if (x.kind() == K::InexactZero || y.kind() == K::InexactZero)
    return PadicNumber::inexact_zero(p, x.valuation_lower_bound() + y.valuation_lower_bound());
  int n = std::min(x.relative_precision(), y.relative_precision());
  Int mod = prime_power(p.value(), (unsigned long)n);
  return PadicNumber::from_unit(p, x.valuation() + y.valuation(), x.unit() * y.unit() % mod, n);
}

PadicNumber operator/(const PadicNumber& x, const PadicNumber& y) {
  check_same_prime(x, y);
  using K = PadicNumber::Kind;
  const Prime& p = x.prime();
  if (y.kind() != K::Unit)
    fail(errc::division_by_inexact_zero,
         y.kind() == K::ExactZero ? "division by certified zero"
                                  : "divisor is an inexact zero with unknown valuation");
  if (x.kind() == K::ExactZero) return x;
  if (x.kind() == K::InexactZero)
    return PadicNumber::inexact_zero(p, x.valuation_lower_bound() - y.valuation());
  int n = std::min(x.relative_precision(), y.relative_precision());
  Int mod = prime_power(p.value(), (unsigned long)n);
  Int u = x.unit() * mod_inverse(y.unit(), mod) % mod;
  return PadicNumber::from_unit(p, x.valuation() - y.valuation(), u, n);
}

std::string PadicNumber::to_string() const {
  std::string ps = std::to_string(p_.value());
  switch (kind_) {
    case Kind::ExactZero: return "0 (certified)";
    case Kind::InexactZero: return "O(" + ps + "^" + std::to_string(val_) + ")";
    case Kind::Unit: {
      std::string s = unit_.get_str();
      if (val_ != 0) s += "*" + ps + "^" + std::to_string(val_);
      return s + " + O(" + ps + "^" + std::to_string(val_ + prec_) + ")";
    }
  }
  return "?";
}

PadicNumber padic_pow(const PadicNumber& x, long k) {
  const Prime& p = x.prime();
  if (k == 0) {
    int n = x.is_unit_form() ? x.relative_precision() : kDefaultPrecision;
    return PadicNumber::one(p, n);
  }
  if (k < 0) {
    if (!x.is_unit_form()) fail(errc::division_by_inexact_zero, "negative power of a zero");
    return PadicNumber::one(p, x.relative_precision()) / padic_pow(x, -k);
  }
  PadicNumber acc = PadicNumber::one(p, x.is_unit_form() ? x.relative_precision() : kDefaultPrecision);
  PadicNumber base = x;
  unsigned long e = (unsigned long)k;
  while (e) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return acc;
}

uint64_t teichmuller_order(const PadicNumber& u) {
  if (!u.is_unit_form() || u.valuation() != 0)
    fail(errc::not_a_unit, "teichmuller order requires an exact-valuation unit");
  if (u.p() == 2) return 1;
  return multiplicative_order_mod_prime(u.unit(), u.prime());
}

PadicNumber teichmuller_lift(const Prime& p, const Int& a, int prec) {
  Int pp((unsigned long)p.value());
  Int r = positive_mod(a, pp);
  if (p.value() == 2) {
    if (mpz_even_p(a.get_mpz_t())) fail(errc::not_a_unit, "teichmuller lift of an even number");
    Int mod = prime_power(2, (unsigned long)prec);
    bool plus = positive_mod(a, Int(4)) == 1;
    return PadicNumber::from_unit(p, 0, plus ? Int(1) : mod - 1, prec);
  }
  if (r == 0) fail(errc::not_a_unit, "teichmuller lift of a non-unit");
  Int mod = prime_power(p.value(), (unsigned long)prec);
  Int x = r;
  for (int i = 0; i < prec + 1; ++i) x = mod_pow(x, pp, mod);
  return PadicNumber::from_unit(p, 0, x, prec);
}

PadicNumber exp_p(const PadicNumber& x) {
  const Prime& p = x.prime();
  long pm1 = (long)p.value() - 1;
  if (x.is_exact_zero()) return PadicNumber::one(p);
  if (x.is_inexact_zero()) {
    long m = x.valuation_lower_bound();
    if (m * pm1 <= 1) fail(errc::outside_exp_domain, "argument bound too weak for exp");
    return PadicNumber::from_unit(p, 0, Int(1), (int)std::min<long>(m, kDefaultPrecision * 4));
  }
  long v = x.valuation();
  if (v * pm1 <= 1)
    fail(errc::outside_exp_domain,
         "exp_p requires v_p(x) > 1/(p-1); got v = " + std::to_string(v));
  long a = x.abs_precision();
  Int X = x.unit() * prime_power(p.value(), (unsigned long)v);
  // Exact partial sum.  Term k has valuation >= k*v - (k-1)/(p-1), which is
  // strictly increasing in k because v > 1/(p-1); stop once it clears a.
  Rat sum(1), term(1);
  for (long k = 1;; ++k) {
    if (k * v * pm1 - (k - 1) >= a * pm1) break;
    term *= Rat(X);
    term /= k;
    sum += term;
    if (k > 8 * a + 64) fail(errc::internal, "exp_p failed to converge");
  }
  return PadicNumber::embed_rational(sum, p, (int)a).with_abs_precision(a);
}

PadicNumber log_p(const PadicNumber& u) {
  const Prime& p = u.prime();
  if (!u.is_unit_form() || u.valuation() != 0)
    fail(errc::outside_log_domain, "log_p requires a unit with |u|_p = 1");
  long a = u.abs_precision();
  Int mod = prime_power(p.value(), (unsigned long)a);
  Int T = positive_mod(u.unit() - 1, mod);
  if (T == 0) return PadicNumber::inexact_zero(p, a);
  Int pp((unsigned long)p.value());
  long vt = int_valuation(T, pp);
  if (vt < 1) fail(errc::outside_log_domain, "log_p requires |u - 1|_p < 1");
  // Term t^k/k has valuation >= k*vt - log2(k), and that lower bound is
  // nondecreasing in k for vt >= 1, so the first k clearing a ends the sum.
  Rat sum(0), power(1);
  for (long k = 1;; ++k) {
    long log2k = 0;
    while ((1L << log2k) < k) ++log2k;
    if (k * vt - log2k >= a) break;
    power *= Rat(T);
    Rat term = power / k;
    if (k % 2 == 0) term = -term;
    sum += term;
    if (k > 16 * a + 256) fail(errc::internal, "log_p failed to converge");
  }
  if (sum == 0) return PadicNumber::inexact_zero(p, a);
  return PadicNumber::embed_rational(sum, p, (int)a).with_abs_precision(a);
}

} // namespace padicdyn
