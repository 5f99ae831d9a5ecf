#pragma once

#include <map>
#include <string>
#include <vector>

#include "padicdyn/padic.hpp"
#include "padicdyn/series.hpp"

namespace padicdyn {

// Dense univariate polynomial over Q, exact arithmetic.
class UniPolyQ {
public:
  UniPolyQ() : c_{Rat(0)} {}
  explicit UniPolyQ(std::vector<Rat> coeffs);
  static UniPolyQ constant(const Rat& a) { return UniPolyQ({a}); }
  static UniPolyQ variable() { return UniPolyQ({Rat(0), Rat(1)}); }

  int degree() const; // -1 for the zero polynomial
  const Rat& coeff(int n) const;
  const std::vector<Rat>& coeffs() const { return c_; }
  bool is_zero() const { return degree() < 0; }

  friend UniPolyQ operator+(const UniPolyQ& a, const UniPolyQ& b);
  friend UniPolyQ operator-(const UniPolyQ& a, const UniPolyQ& b);
  friend UniPolyQ operator*(const UniPolyQ& a, const UniPolyQ& b);
  UniPolyQ operator-() const;
  UniPolyQ scaled(const Rat& s) const;

  UniPolyQ derivative() const;
  UniPolyQ compose(const UniPolyQ& g) const;
  UniPolyQ pow(unsigned e) const;

  Rat evaluate(const Rat& x) const;
  PadicNumber evaluate(const PadicNumber& x) const;
  PadicSeries evaluate(const PadicSeries& x) const;

  // Exact division with remainder (b != 0).
  static std::pair<UniPolyQ, UniPolyQ> divmod(const UniPolyQ& a, const UniPolyQ& b);
  static UniPolyQ gcd(UniPolyQ a, UniPolyQ b); // monic

  // All rational roots with multiplicities, via the rational root theorem.
  std::vector<std::pair<Rat, int>> rational_roots() const;

  // Coefficients reduced mod a prime; fails if a denominator vanishes mod p.
  std::vector<uint64_t> mod_p(const Prime& p) const;

  std::string to_string(const std::string& var = "t") const;

private:
  std::vector<Rat> c_;
  void trim();
};

// Polynomials over F_p, coefficient vectors with c[deg] != 0 (empty = zero).
std::vector<uint64_t> fp_trim(std::vector<uint64_t> a);
std::vector<uint64_t> fp_divmod_r(std::vector<uint64_t> a, const std::vector<uint64_t>& b, uint64_t p);
std::vector<uint64_t> fp_gcd(std::vector<uint64_t> a, std::vector<uint64_t> b, uint64_t p);
std::vector<uint64_t> fp_derivative(const std::vector<uint64_t>& a, uint64_t p);
uint64_t fp_eval(const std::vector<uint64_t>& a, uint64_t x, uint64_t p);

// Sparse multivariate polynomial over Q in g variables.
class MultiPolyQ {
public:
  explicit MultiPolyQ(int g) : g_(g) {}
  static MultiPolyQ constant(int g, const Rat& a);
  static MultiPolyQ variable(int g, int i);

  int nvars() const { return g_; }
  bool is_zero() const { return terms_.empty(); }
  int total_degree() const;
  const std::map<std::vector<int>, Rat>& terms() const { return terms_; }
  void set(const std::vector<int>& e, const Rat& a);

  friend MultiPolyQ operator+(const MultiPolyQ& a, const MultiPolyQ& b);
  friend MultiPolyQ operator-(const MultiPolyQ& a, const MultiPolyQ& b);
  friend MultiPolyQ operator*(const MultiPolyQ& a, const MultiPolyQ& b);
  MultiPolyQ operator-() const;
  MultiPolyQ scaled(const Rat& s) const;
  MultiPolyQ pow(unsigned e) const;

  Rat evaluate(const std::vector<Rat>& x) const;
  PadicNumber evaluate(const std::vector<PadicNumber>& x) const;
  PadicSeries evaluate(const std::vector<PadicSeries>& x) const;
  // Polynomial substitution x_i = args[i]; args share one arity.
  MultiPolyQ compose(const std::vector<MultiPolyQ>& args) const;
  // Substitute x_i = linear combination sum_j m[i][j] y_j (exact, for
  // restricting a variety to an invariant subspace).
  MultiPolyQ substitute_linear(const std::vector<std::vector<Rat>>& m, int new_g) const;

  std::string to_string() const;

private:
  int g_;
  std::map<std::vector<int>, Rat> terms_; // exponent vector (size g) -> coeff
};

// Recursive-descent parser for the CLI polynomial grammar: integers,
// rationals a/b, variables t or x0..x{g-1}, + - * ^ and parentheses.
// `t` is accepted only when g == 1 and means x0.
MultiPolyQ parse_poly(const std::string& text, int g);
UniPolyQ parse_unipoly(const std::string& text);

} // namespace padicdyn
