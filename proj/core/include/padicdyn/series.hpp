#pragma once

#include <optional>
#include <string>
#include <vector>

#include "padicdyn/padic.hpp"

namespace padicdyn {

inline constexpr int kDefaultSeriesDegree = 32;

// Tail certificate: v_p(c_n) >= vb + n * vrho for every index n beyond the
// computed degree.  Rates are rational because exp-type tails decay at
// v(c) - 1/(p-1) per degree.
struct TailCertificate {
  Rat vb;
  Rat vrho;
};

// nullopt = +infinity (coefficient known to vanish exactly).
using VBound = std::optional<Rat>;

VBound vb_min(const VBound& a, const VBound& b);
VBound vb_add(const VBound& a, const VBound& b);
bool vb_ge(const VBound& a, const Rat& r); // a >= r (with +inf >= anything)

// One-variable truncated power series over Q_p.  A series either is a
// polynomial (no tail: coefficients beyond degree() vanish exactly) or
// carries a TailCertificate.  All arithmetic keeps coefficient precision and
// tail bounds sound; nothing here ever rounds optimistically.
class PadicSeries {
public:
  PadicSeries(const Prime& p, std::vector<PadicNumber> coeffs,
              std::optional<TailCertificate> tail = std::nullopt);

  static PadicSeries zero(const Prime& p);
  static PadicSeries constant(const PadicNumber& c);
  static PadicSeries identity(const Prime& p, int prec = kDefaultPrecision); // z
  static PadicSeries monomial(const PadicNumber& c, int n);

  const Prime& prime() const noexcept { return p_; }
  uint64_t p() const noexcept { return p_.value(); }
  int degree() const noexcept { return (int)c_.size() - 1; }
  bool is_polynomial() const noexcept { return !tail_.has_value(); }
  const std::optional<TailCertificate>& tail() const noexcept { return tail_; }

  // n may exceed degree(); that returns an exact zero for polynomials and is
  // an internal error for certified series (the tail is not coefficient data).
  PadicNumber coeff(int n) const;

  // Sound lower bound on v_p(c_n) for any n >= 0.
  VBound coeff_bound(long n) const;
  // Largest vb with v_p(c_n) >= vb + n*rate for all n >= from.  nullopt when
  // no such vb exists (tail decays slower than `rate`); an all-zero range
  // yields a saturated finite bound instead of +infinity.
  VBound envelope(const Rat& rate, long from = 0) const;
  // Distinct slopes of the lower hull of (n, bound) plus the tail rate;
  // useful starting points when an envelope rate must be chosen.
  std::vector<Rat> candidate_rates() const;

  bool zero_to_precision() const;

  friend PadicSeries operator+(const PadicSeries& a, const PadicSeries& b);
  friend PadicSeries operator-(const PadicSeries& a, const PadicSeries& b);
  friend PadicSeries operator*(const PadicSeries& a, const PadicSeries& b);
  PadicSeries operator-() const;
  PadicSeries scaled(const PadicNumber& s) const;          // s * f(z)
  PadicSeries scaled_argument(const PadicNumber& a) const; // f(a*z)
  PadicSeries shifted(int k) const;                        // z^k * f(z)
  PadicSeries truncated(int d) const;

  // f(x).  Needs tail rate + v(x) > 0 unless polynomial.
  PadicNumber evaluate(const PadicNumber& x) const;
  // f(g(z)), truncated to min degree.  For certified f the constant term of g
  // must stay inside the certified disk.
  PadicSeries compose(const PadicSeries& g) const;
  // f(c + p^m * w) as a series in w (m >= 0; |c| <= 1).
  PadicSeries recentered(const PadicNumber& c, int m) const;

  std::string to_string() const;

private:
  Prime p_;
  std::vector<PadicNumber> c_;
  std::optional<TailCertificate> tail_;
};

// exp(t) and log(1 + t) of a series with zero-like constant term, truncated
// at `degree`.  exp needs every coefficient bound of t above 1/(p-1).
// `prec` sets the relative precision of the 1/k! and 1/k scalars.
PadicSeries exp_series(const PadicSeries& t, int degree,
                       int prec = kDefaultPrecision);
PadicSeries log1p_series(const PadicSeries& t, int degree,
                         int prec = kDefaultPrecision);

} // namespace padicdyn
