#include "padicdyn/dichotomy.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "padicdyn/errors.hpp"
#include "padicdyn/newton.hpp"

namespace padicdyn {

std::optional<ZeroDichotomy> decide_identically_zero(
    const PadicSeries& theta, const std::function<bool(long)>& member_at) {
  if (!theta.zero_to_precision())
    fail(errc::invalid_input,
         "identically-zero decision requires a series that is zero to "
         "precision");
  std::optional<long> cap = hypothetical_strassman_T(theta);
  if (!cap) return std::nullopt;
  ZeroDichotomy out;
  out.capacity = *cap;
  if (*cap < 0) {
    // No compatible series has a nonzero coefficient at all.
    out.identically_zero = true;
    return out;
  }
  // A compatible nonzero series has at most capacity zeros in the closed
  // unit disk, so capacity + 1 confirmed integers contradict it.
  long confirmed = 0;
  for (long k = 0;; ++k) {
    ++out.probes;
    if (!member_at(k)) {
      out.identically_zero = false;
      return out;
    }
    ++confirmed;
    if (confirmed > *cap) {
      out.identically_zero = true;
      return out;
    }
  }
}

namespace {

struct Ball {
  long c;  // residue, 0 <= c < p^m
  long m;  // depth: the ball is c + p^m Zp
};

}  // namespace

std::optional<IntegerZeroScan> integer_zeros(
    const PadicSeries& theta, long bound,
    const std::function<bool(long)>& exact_check) {
  const Prime& p = theta.prime();
  const long pv = static_cast<long>(p.value());
  if (bound < 1) bound = 1;
  constexpr long kVisitCap = 200000;

  IntegerZeroScan scan;
  bool all_closed = true;
  long visits = 0;

  std::deque<Ball> work;
  work.push_back({0, 0});
  while (!work.empty()) {
    Ball b = work.front();
    work.pop_front();
    if (++visits > kVisitCap) return std::nullopt;

    StrassmanBound sb;
    try {
      // At depth 0 the recentering would only weaken the tail certificate,
      // so bound the root ball with the series itself.
      if (b.m == 0) {
        sb = strassman(theta);
      } else {
        PadicNumber c = PadicNumber::embed_rational(Rat(b.c), p);
        sb = strassman(theta.recentered(c, static_cast<int>(b.m)));
      }
    } catch (const error&) {
      return std::nullopt;  // no usable zero bound in this ball
    }
    if (sb.identically_zero_to_prec) return std::nullopt;
    if (sb.T == 0) continue;  // ball certified zero-free

    // Once p^b.m >= bound the ball meets [0, bound) in at most the single
    // integer b.c, which is also its minimal nonnegative representative.
    long pm = 1;
    bool overflow = false;
    for (long i = 0; i < b.m; ++i) {
      if (pm > std::numeric_limits<long>::max() / (2 * pv)) {
        overflow = true;
        break;
      }
      pm *= pv;
    }
    const bool pinned = overflow || pm >= bound;

    if (pinned) {
      long confirmed = 0;
      if (exact_check(b.c)) {
        scan.zeros.push_back(b.c);
        confirmed = 1;
      }
      if (sb.T != confirmed) all_closed = false;
      continue;
    }
    for (long t = 0; t < pv; ++t) work.push_back({b.c + t * pm, b.m + 1});
  }

  std::sort(scan.zeros.begin(), scan.zeros.end());
  scan.exhaustive = all_closed;
  scan.verified_bound = bound;
  return scan;
}

}  // namespace padicdyn
