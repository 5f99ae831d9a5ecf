#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "padicdyn/series.hpp"

namespace padicdyn {

// One polygon segment.  `slope` is the common valuation of the roots the
// segment accounts for (the negative of the geometric slope of the lower
// hull edge); `length` is the number of such roots with multiplicity.
struct NewtonSegment {
  Rat slope;
  long length;
};

struct NewtonPolygon {
  // Lower convex hull of {(n, v_p(c_n))} over coefficients with known
  // valuation, in increasing index order.
  std::vector<std::pair<long, long>> vertices;
  // Hull edges left to right; geometric slopes strictly increase, so the
  // reported root-valuation slopes strictly decrease.
  std::vector<NewtonSegment> segments;
  // Root valuations >= this value are provably complete and exact despite
  // coefficients that are only bounded (inexact zeros, certified tail).
  // nullopt: the polygon is exact everywhere (fully known polynomial).
  std::optional<Rat> certified_min_slope;

  bool has_slope(const Rat& s) const;
  std::string to_string() const;
};

// Lower convex hull of coefficient valuations.  Errors with
// errc::insufficient_precision when a bounded-only coefficient cannot be
// proved irrelevant to the certified slope range, errc::invalid_input for
// the identically zero series.
NewtonPolygon polygon(const PadicSeries& f);

// Zero-count bound on the closed unit disk.  T = last index attaining the
// minimal coefficient valuation; the series has at most T zeros there.
struct StrassmanBound {
  bool identically_zero_to_prec = false;
  long T = -1;
  long min_valuation = 0; // m*, meaningful when !identically_zero_to_prec
};

// Errors with errc::no_certificate when bounded-only coefficients or the
// tail cannot be proved to stay above the observed minimum valuation, or
// when a non-polynomial input has tail rate < 0 (disk not covered).
StrassmanBound strassman(const PadicSeries& f);

// For a series that is zero to working precision: the last index at which a
// hypothetical nonzero coefficient hiding below the precision floor could
// attain the maximal absolute value.  Returns -1 when no coefficient can be
// nonzero (exact zero series), nullopt when the floor has no last attaining
// index (tail rate <= 0 leaves it unbounded).
std::optional<long> hypothetical_strassman_T(const PadicSeries& f);

// Candidate exponents k >= 0 with f(lambda^k) possibly zero: zeros of f at
// lambda^k force k * v_p(lambda) to be a segment slope of f's polygon.
// Requires 0 < |lambda|_p < 1.  Complete: every actual zero index appears.
std::vector<long> candidate_orbit_indices(const PadicSeries& f,
                                          const PadicNumber& lambda);

} // namespace padicdyn
