#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "padicdyn/series.hpp"

namespace padicdyn {

// Outcome of the vanish-or-finite decision for a membership series.
struct ZeroDichotomy {
  bool identically_zero = false;
  // Number of exact membership checks performed while deciding.
  long probes = 0;
  // The hypothetical Strassman bound used (capacity of a compatible
  // nonzero series); -1 when no nonzero coefficient is possible at all.
  long capacity = -1;
};

// Decides whether a zero-to-precision series represents the zero function,
// given an exact membership oracle for integer arguments.  Uses the
// capacity bound from hypothetical_strassman_T: a compatible nonzero
// series has at most `capacity` zeros in the closed unit disk, so
// capacity + 1 confirmed integer zeros rule it out.  Returns nullopt when
// no finite capacity bound exists at the current precision.
std::optional<ZeroDichotomy> decide_identically_zero(
    const PadicSeries& theta, const std::function<bool(long)>& member_at);

// Result of scanning for nonnegative integer zeros of a series.
struct IntegerZeroScan {
  std::vector<long> zeros;  // sorted, confirmed by the exact check
  // True when the ball subdivision closed every ball: `zeros` is then the
  // complete set of nonnegative integer zeros, with no bound.
  bool exhaustive = false;
  // When not exhaustive, all integers in [0, verified_bound) were covered.
  long verified_bound = 0;
};

// Finds nonnegative integer zeros of `theta` by p-adic ball subdivision.
// Each ball B(c, m) = c + p^m Zp is tested with a Strassman bound on the
// recentered series; balls with zero capacity are pruned.  Once a ball
// pins a single integer below `bound` the candidate is confirmed or
// refuted by `exact_check`.  A ball is closed when its capacity is fully
// accounted for by confirmed zeros inside it; if every ball closes the
// scan is exhaustive over all of Zp, otherwise it still rigorously covers
// [0, bound).  Returns nullopt when a Strassman bound is unavailable
// (series indistinguishable from zero, or certificate too weak) or the
// subdivision exceeds its work cap.  Exceptions from `exact_check`
// propagate.
std::optional<IntegerZeroScan> integer_zeros(
    const PadicSeries& theta, long bound,
    const std::function<bool(long)>& exact_check);

}  // namespace padicdyn
