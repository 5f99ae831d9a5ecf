#pragma once

#include <utility>
#include <vector>

#include "padicdyn/matrix.hpp"
#include "padicdyn/multiseries.hpp"

namespace padicdyn {

enum class ConjugacyRegime { attracting_homothety, indifferent_diagonal };
enum class CertificateKind { rigorous, heuristic };

// A fixed point at the origin: x -> f(x) with f(0) = 0 and Df(0) = A.
struct LocalMap {
  Prime p;
  int g;
  std::vector<MultiSeries> f;
  PadicMatrix A;
};

// Build from exact rational component polynomials (must vanish at 0).
LocalMap make_local_map(const Prime& p, const std::vector<MultiPolyQ>& comps,
                        int maxdeg, int prec = kDefaultPrecision);
// Build from already-expanded component series.
LocalMap make_local_map(std::vector<MultiSeries> comps);

// Conjugacy h with f(h(x)) = h(Ax), Dh(0) = Id, valid on the open polydisk
// v_p(x_i) > radius_valuation.
struct Conjugacy {
  std::vector<MultiSeries> h;
  Rat radius_valuation;
  ConjugacyRegime regime;
  CertificateKind certificate;
};

struct DivisorWitness {
  std::vector<int> e;
  int i;
  long valuation; // v_p(lambda^e - lambda_i)
};

struct SmallDivisorReport {
  int checked_degree;
  Rat min_divisor_valuation;
  std::vector<DivisorWitness> witnesses;
};

struct ResidualReport {
  bool zero_to_precision;
  long min_valuation_bound; // kAbsPrecInf when the residual vanishes exactly
  int through_degree;
};

// A = lambda * Id with 0 < |lambda|_p < 1.  Solves the coefficient recursion
// h_e * (lambda^{|e|} - lambda) = [x^e] P(h); every divisor has valuation
// exactly v_p(lambda).  Radius certificate is rigorous: with c chosen so the
// rescaled perturbation is integral, v(h_e) >= -(|e|-1)(v_lambda + v_c) and
// h converges and is injective for v(x) > v_lambda + v_c.
Conjugacy linearize_attracting(const LocalMap& m, int degree);

// A diagonal with unit eigenvalues; multiplicative independence is verified
// for all |e| <= e_max first.  Radius is extrapolated from observed
// coefficient growth; certificate stays heuristic.
std::pair<Conjugacy, SmallDivisorReport>
linearize_indifferent(const LocalMap& m, int e_max, int degree);

// Coefficientwise check of f(h(x)) - h(Ax) through the given total degree.
ResidualReport verify_conjugacy(const LocalMap& m, const Conjugacy& c, int degree);

} // namespace padicdyn
