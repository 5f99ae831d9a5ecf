#pragma once

#include <optional>
#include <vector>

#include "padicdyn/decomposition.hpp"
#include "padicdyn/linearize.hpp"
#include "padicdyn/polynomial.hpp"

namespace padicdyn {

// Return-set analysis for coordinatewise polynomial maps: x_i -> f_i(x_i)
// on affine g-space over Q, asking which orbit indices land on a variety.

enum class OrbitStrategy { automatic, attracting, indifferent, brute_force };

enum class PointClass { attracting_homothety, indifferent_diagonal, unsupported };

struct OrbitBounds {
  long m_max = 8;         // largest periodic-point period searched
  long burn_in_cap = 64;  // basin-entry search window
  int degree = 32;        // series truncation degree
  int precision = kDefaultPrecision;
  int e_max = 8;          // multiplicative-relation check bound
  long n_max = 10000;     // window the decomposition must describe
  long p_max = 100;       // prime scan bound
};

struct OrbitProblem {
  std::vector<UniPolyQ> maps;  // one univariate polynomial per coordinate
  std::vector<Rat> alpha;
  std::vector<MultiPolyQ> variety;  // generators in x0..x{g-1}
  OrbitStrategy strategy = OrbitStrategy::automatic;
  std::optional<Prime> prime_hint;  // when set, the only prime considered
  OrbitBounds bounds;
};

struct PeriodicPointData {
  Prime p;
  std::vector<PadicNumber> beta;  // periodic point, coordinatewise
  long period = 1;                // exact period M (not a proper multiple)
  std::vector<PadicNumber> multipliers;  // (f_i^M)'(beta_i)
  PointClass classification = PointClass::unsupported;
  std::vector<uint64_t> residues;  // beta mod p (tie-breaking, diagnostics)
  long approach_index = 0;  // first n with the orbit inside the approach region
  // Exact rational value of beta_i when the Hensel root is rational; this
  // makes membership constants at the periodic point exactly decidable.
  std::vector<std::optional<Rat>> beta_exact;
};

// Searches periods M <= m_max for periodic points whose basin the orbit
// provably approaches: per coordinate, roots of f_i^M(t) - t found mod p and
// Hensel-lifted at simple roots only.  Candidates are ordered by period, then
// approach index, then beta mod p.  Non-simple roots are skipped and reported
// in the failure diagnostic when nothing else works.
PeriodicPointData find_periodic_point(const OrbitProblem& pb, const Prime& p);

// Least N0 <= burn_in_cap such that the exact orbit point at every cycle
// offset j sits strictly inside the certified polydisk of the linearization
// at the j-th cycle point.  Builds the linearizations internally.
long enter_basin(const OrbitProblem& pb, const PeriodicPointData& pp);

ReturnSetDecomposition solve_attracting(const OrbitProblem& pb, const Prime& p);
ReturnSetDecomposition solve_indifferent(const OrbitProblem& pb, const Prime& p);

// Strategy dispatcher: preperiodic enumeration, then attracting, indifferent,
// and brute-force-only over the admissible primes; first success is
// cross-checked against the exact oracle on [0, min(n_max, 2000)).
ReturnSetDecomposition solve_orbit(const OrbitProblem& pb);

// Membership window [0, n_max).  Entries inside the exact-height window are
// decided by exact rational iteration; beyond it, four independent 62-bit
// modular witnesses decide (non-membership rigorous, membership residual).
std::vector<char> brute_force_membership(const OrbitProblem& pb, long n_max);

} // namespace padicdyn
