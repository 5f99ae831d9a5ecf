#pragma once

#include <climits>
#include <cstdint>
#include <string>

#include "padicdyn/prime.hpp"
#include "padicdyn/rational.hpp"

namespace padicdyn {

inline constexpr int kDefaultPrecision = 64;
inline constexpr long kAbsPrecInf = LONG_MAX;

// An element of Q_p at finite relative precision: unit * p^v + O(p^{v+N})
// with 0 <= unit < p^N and p coprime to unit.  Two zero flavors are
// first-class: an exact zero (valuation +inf, from embedding the rational 0)
// and an inexact zero O(p^M) whose valuation is only bounded below (the
// honest outcome of full cancellation).  No operation ever reports more
// precision than its inputs justify.
class PadicNumber {
public:
  enum class Kind { ExactZero, InexactZero, Unit };

  static PadicNumber exact_zero(const Prime& p);
  static PadicNumber inexact_zero(const Prime& p, long bound); // O(p^bound)
  static PadicNumber from_unit(const Prime& p, long v, Int unit, int prec);
  static PadicNumber one(const Prime& p, int prec = kDefaultPrecision);
  // v_p(denominator) != 0 -> errc::denominator_divisible_by_p.
  static PadicNumber embed_rational(const Rat& a, const Prime& p, int prec = kDefaultPrecision);

  Kind kind() const noexcept { return kind_; }
  bool is_exact_zero() const noexcept { return kind_ == Kind::ExactZero; }
  bool is_inexact_zero() const noexcept { return kind_ == Kind::InexactZero; }
  bool is_zero_like() const noexcept { return kind_ != Kind::Unit; }
  bool is_unit_form() const noexcept { return kind_ == Kind::Unit; }

  const Prime& prime() const noexcept { return p_; }
  uint64_t p() const noexcept { return p_.value(); }

  // Exact valuation; errc::indeterminate_valuation on either zero flavor.
  long valuation() const;
  // Sound lower bound on the valuation (kAbsPrecInf for the exact zero).
  long valuation_lower_bound() const noexcept;
  // Relative precision in digits; only meaningful on unit-form values.
  int relative_precision() const;
  // The value is known modulo p^{abs_precision()}.
  long abs_precision() const noexcept;
  const Int& unit() const;

  PadicNumber with_abs_precision(long a) const;      // forget digits beyond p^a
  PadicNumber with_relative_precision(int n) const;  // unit-form truncation

  // True if the value is indistinguishable from zero at its own precision.
  bool is_zero_to_precision() const noexcept { return is_zero_like(); }

  friend PadicNumber operator+(const PadicNumber& x, const PadicNumber& y);
  friend PadicNumber operator-(const PadicNumber& x, const PadicNumber& y);
  friend PadicNumber operator*(const PadicNumber& x, const PadicNumber& y);
  friend PadicNumber operator/(const PadicNumber& x, const PadicNumber& y);
  PadicNumber operator-() const;

  std::string to_string() const;

private:
  PadicNumber(const Prime& p, Kind k, long v, Int u, int n)
      : p_(p), kind_(k), val_(v), prec_(n), unit_(std::move(u)) {}

  Prime p_;
  Kind kind_;
  long val_;  // valuation (Unit) or valuation lower bound (InexactZero)
  int prec_;  // relative digits, Unit only
  Int unit_;
};

PadicNumber padic_pow(const PadicNumber& x, long k);

// Least d >= 1 with |u^d - 1|_p < 1.  For p = 2 this is 1 for every unit; the
// multiplicative order of u mod p otherwise.  Requires an exact-valuation unit.
uint64_t teichmuller_order(const PadicNumber& u);

// The Teichmuller representative congruent to a mod p (p odd), as a unit to
// precision prec.  For p = 2 returns +-1 by the class of a mod 4.
PadicNumber teichmuller_lift(const Prime& p, const Int& a, int prec);

// exp_p: defined for v_p(x) > 1/(p-1), i.e. v >= 1 (p odd) or v >= 2 (p = 2);
// errc::outside_exp_domain otherwise.  exp_2(2) is rejected: v = 1 is not
// strictly above 1/(2-1).
PadicNumber exp_p(const PadicNumber& x);

// log_p: defined for |u - 1|_p < 1; errc::outside_log_domain otherwise.
// exp_p(log_p(u)) = u whenever v_p(u - 1) > 1/(p-1).
PadicNumber log_p(const PadicNumber& u);

} // namespace padicdyn
