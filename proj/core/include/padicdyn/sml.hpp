#pragma once

#include <optional>
#include <string>
#include <vector>

#include "padicdyn/decomposition.hpp"
#include "padicdyn/matrix.hpp"
#include "padicdyn/polynomial.hpp"
#include "padicdyn/prime.hpp"

namespace padicdyn {

// Return-set problem for an iterated linear map: which n have L^n(alpha) on
// the variety cut out by the generators?
struct LinearOrbitProblem {
  QMatrix L;                      // g x g rational matrix
  std::vector<Rat> alpha;         // start point
  std::vector<MultiPolyQ> variety;  // generators in g variables
  std::optional<Prime> prime_hint;  // when set, this prime is used or the
                                    // solve fails; no fallback search
};

// Return-set problem for a monomial endomorphism of the torus:
// Phi(x)_i = prod_j x_j^{A[i][j]} with det A != 0, alpha coordinatewise
// nonzero.
struct TorusOrbitProblem {
  QMatrix exponents;              // integer entries, det != 0
  std::vector<Rat> alpha;         // nonzero coordinates
  std::vector<MultiPolyQ> variety;
  std::optional<Prime> prime_hint;
};

struct SolveOptions {
  int precision = kDefaultPrecision;  // working p-adic digits
  int degree = 48;                    // series truncation degree
  long n_max = 10000;                 // completeness window for exact checks
  long p_max = 10000;                 // prime search bound
};

// A prime where the orbit becomes p-adically analytic, together with the
// Jordan data of the map at that prime.
struct PrimeSelection {
  Prime p;
  JordanForm jordan;
  long d = 1;                          // from choose_d on the Jordan form
  std::vector<std::string> rejected;   // "p: reason" per candidate discarded
};

// Smallest admissible prime <= p_max (or the hint, which is then mandatory):
// p divides no denominator of the problem data, the characteristic
// polynomial splits over Q_p with a Jordan basis that is integral with unit
// determinant, and every eigenvalue is a p-adic unit.  Throws
// errc::no_prime_found with the collected rejection reasons.
PrimeSelection select_prime(const LinearOrbitProblem& problem,
                            long p_max = 10000,
                            int precision = kDefaultPrecision);
PrimeSelection select_prime(const TorusOrbitProblem& problem,
                            long p_max = 10000,
                            int precision = kDefaultPrecision);

// Exact decomposition of {n >= 0 : L^n(alpha) in V}.  Singular L is reduced
// to the invertible map induced on the stable image of L, with the first
// dim(L) indices checked directly.  Throws errc::precision_exhausted when
// the internal precision ladder cannot separate a residue class from zero.
ReturnSetDecomposition solve_linear(const LinearOrbitProblem& problem,
                                    const SolveOptions& options = {});

// Exact decomposition of {n >= 0 : Phi^n(alpha) in V} for the monomial map.
// Membership values live on a fixed coprime factor basis, so exact
// confirmation stays cheap whenever the expanded value fits the bit guard;
// positives beyond it are confirmed by deterministic modular witnesses and
// downgrade the certificate to heuristic.
ReturnSetDecomposition solve_torus(const TorusOrbitProblem& problem,
                                   const SolveOptions& options = {});

// Exact membership bits for 0 <= n < n_max by direct iteration.  Throws
// errc::bit_growth_exceeded when the orbit data outgrows the guard.
std::vector<char> brute_force_membership(const LinearOrbitProblem& problem,
                                         long n_max);
std::vector<char> brute_force_membership(const TorusOrbitProblem& problem,
                                         long n_max);

}  // namespace padicdyn
