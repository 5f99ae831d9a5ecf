#pragma once

#include <map>
#include <string>
#include <vector>

#include "padicdyn/polynomial.hpp"
#include "padicdyn/series.hpp"

namespace padicdyn {

// Truncated multivariate power series over Q_p: terms of total degree <= D,
// exponent-keyed, deterministic (lexicographic) iteration order.  Purely
// formal; callers supply analytic tail bounds where needed.
class MultiSeries {
public:
  MultiSeries(const Prime& p, int g, int maxdeg);

  static MultiSeries zero(const Prime& p, int g, int maxdeg);
  static MultiSeries variable(const Prime& p, int g, int maxdeg, int i,
                              int prec = kDefaultPrecision);
  static MultiSeries constant(const Prime& p, int g, int maxdeg, const PadicNumber& c);

  const Prime& prime() const { return p_; }
  int nvars() const { return g_; }
  int maxdeg() const { return maxdeg_; }
  const std::map<std::vector<int>, PadicNumber>& terms() const { return terms_; }

  PadicNumber coeff(const std::vector<int>& e) const;
  void set(const std::vector<int>& e, const PadicNumber& c);

  friend MultiSeries operator+(const MultiSeries& a, const MultiSeries& b);
  friend MultiSeries operator-(const MultiSeries& a, const MultiSeries& b);
  friend MultiSeries operator*(const MultiSeries& a, const MultiSeries& b);
  MultiSeries operator-() const;
  MultiSeries scaled(const PadicNumber& s) const;
  MultiSeries truncated(int d) const;

  // f(a_1 x_1, ..., a_g x_g) for scalars a_i.
  MultiSeries scaled_arguments(const std::vector<PadicNumber>& a) const;
  // Collapse to one variable along the ray x_i = a_i z (polynomial part only).
  PadicSeries along_ray(const std::vector<PadicNumber>& a) const;
  PadicNumber evaluate(const std::vector<PadicNumber>& x) const;
  // Substitute x_i = args[i]; all args share this arity and degree cap.
  MultiSeries compose(const std::vector<MultiSeries>& args) const;

  // Linear part as a matrix row view: coefficient of x_j.
  PadicNumber linear_coeff(int j) const;
  bool zero_to_precision() const;

  std::string to_string() const;

private:
  Prime p_;
  int g_;
  int maxdeg_;
  std::map<std::vector<int>, PadicNumber> terms_;
};

// Embed an exact rational polynomial as a MultiSeries.
MultiSeries embed_poly(const MultiPolyQ& f, const Prime& p, int maxdeg,
                       int prec = kDefaultPrecision);
// Evaluate a rational polynomial at a vector of MultiSeries.
MultiSeries evaluate_poly(const MultiPolyQ& f, const std::vector<MultiSeries>& x);
// Evaluate a rational polynomial at a vector of univariate series.
PadicSeries evaluate_poly(const MultiPolyQ& f, const std::vector<PadicSeries>& x);

// Compositional inverse of a tuple h with linear part Id (h_i = x_i + higher
// order): returns g with h(g(y)) = y through the degree cap.
std::vector<MultiSeries> invert_tuple(const std::vector<MultiSeries>& h);

} // namespace padicdyn
