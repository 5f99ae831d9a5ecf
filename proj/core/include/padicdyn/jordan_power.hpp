#pragma once

#include <vector>

#include "padicdyn/matrix.hpp"
#include "padicdyn/series.hpp"

namespace padicdyn {

// Square matrix of univariate series; the analytic-power entries.
class SeriesMatrix {
public:
  SeriesMatrix(const Prime& p, int n);

  const Prime& prime() const { return p_; }
  int dim() const { return n_; }
  PadicSeries& at(int r, int c) { return e_[(size_t)r * n_ + c]; }
  const PadicSeries& at(int r, int c) const { return e_[(size_t)r * n_ + c]; }

  PadicMatrix evaluate(const PadicNumber& z) const;
  SeriesMatrix scaled_argument(const PadicNumber& s) const;

private:
  Prime p_;
  int n_;
  std::vector<PadicSeries> e_;
};

// z -> (J^d)^z, exact at integers and rigid analytic in z.  The block with
// eigenvalue lambda and size m contributes entries
//   (r, r+j) = (lambda^d)^z * C(dz, j) / lambda^j,   0 <= j < m,
// where (lambda^d)^z = exp_p(z * log_p(lambda^d)) and C(dz, j) is the
// falling-factorial binomial dz(dz-1)...(dz-j+1)/j!.  At z = k this is the
// usual binomial expansion of the (dk)-th power of the block.
struct AnalyticMatrixPower {
  JordanForm J;
  int d;
  SeriesMatrix entries; // series in z
};

// Least d >= 1 with |lambda_i^d - 1|_p small enough for exp/log: the lcm of
// the multiplicative orders of the eigenvalues mod p (mod 4 when p = 2).
long choose_d(const JordanForm& J);

AnalyticMatrixPower analytic_power(const JordanForm& J, long d,
                                   int degree = kDefaultSeriesDegree,
                                   int prec = kDefaultPrecision);

// J^ell * (J^d)^{2pw} as series in w, convergent on the closed unit disk
// (tail rate >= 2 - 1/(p-1) > 0); at w = k it equals J^{ell + 2pdk}.
SeriesMatrix rescaled_power(const AnalyticMatrixPower& a, long ell,
                            int prec = kDefaultPrecision);

} // namespace padicdyn
