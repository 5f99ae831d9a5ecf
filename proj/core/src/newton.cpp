#include "padicdyn/newton.hpp"

#include <algorithm>
#include <sstream>

#include "padicdyn/errors.hpp"

namespace padicdyn {

namespace {

struct HullPoint {
  long n;
  long v;
};

// cross(o, a, b) > 0 iff the turn o->a->b is counterclockwise.
Int cross(const HullPoint& o, const HullPoint& a, const HullPoint& b) {
  return Int(a.n - o.n) * Int(b.v - o.v) - Int(a.v - o.v) * Int(b.n - o.n);
}

// Lower hull via monotone chain; collinear interior points are dropped so
// vertices are exactly the extreme points.
std::vector<HullPoint> lower_hull(const std::vector<HullPoint>& pts) {
  std::vector<HullPoint> h;
  for (const auto& pt : pts) {
    while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), pt) <= 0)
      h.pop_back();
    h.push_back(pt);
  }
  return h;
}

// Hull height at abscissa n (must lie within the hull's index span).
Rat hull_value(const std::vector<HullPoint>& h, long n) {
  for (size_t i = 0; i + 1 < h.size(); ++i) {
    if (n < h[i].n || n > h[i + 1].n) continue;
    Rat g = Rat(h[i + 1].v - h[i].v) / Rat(h[i + 1].n - h[i].n);
    Rat r = Rat(h[i].v) + g * Rat(n - h[i].n);
    r.canonicalize();
    return r;
  }
  return Rat(h.front().v);
}

} // namespace

bool NewtonPolygon::has_slope(const Rat& s) const {
  for (const auto& seg : segments)
    if (seg.slope == s) return true;
  return false;
}

std::string NewtonPolygon::to_string() const {
  std::ostringstream os;
  os << "polygon{";
  for (size_t i = 0; i < segments.size(); ++i) {
    if (i) os << ", ";
    os << "slope " << segments[i].slope.get_str() << " x" << segments[i].length;
  }
  os << "}";
  return os.str();
}

NewtonPolygon polygon(const PadicSeries& f) {
  const int D = f.degree();
  std::vector<HullPoint> pts;
  std::vector<std::pair<long, long>> unknown; // (index, valuation lower bound)
  bool any_inexact = false;
  for (int n = 0; n <= D; ++n) {
    PadicNumber c = f.coeff(n);
    if (c.is_exact_zero()) continue;
    if (c.is_inexact_zero()) {
      any_inexact = true;
      unknown.emplace_back(n, c.valuation_lower_bound());
      continue;
    }
    pts.push_back({n, c.valuation()});
  }

  if (pts.empty()) {
    if (any_inexact || !f.is_polynomial())
      fail(errc::insufficient_precision,
           "no coefficient with known valuation");
    fail(errc::invalid_input, "polygon of the zero series is undefined");
  }

  std::vector<HullPoint> hull = lower_hull(pts);
  const long n_first = hull.front().n;
  const long n_last = hull.back().n;
  long v_min = hull.front().v;
  for (const auto& h : hull) v_min = std::min(v_min, h.v);

  // A bounded-only coefficient inside the hull span is harmless exactly when
  // its true point provably lies on or above the hull; before the span it
  // could prepend arbitrarily steep segments, after the span it must stay
  // strictly above the hull's minimum to leave every slope >= 0 intact.
  bool right_uncertainty = !f.is_polynomial();
  for (const auto& [n, m] : unknown) {
    if (n < n_first)
      fail(errc::insufficient_precision,
           "coefficient below the leading known index "
           "cannot be separated from the hull");
    if (n <= n_last) {
      if (Rat(m) < hull_value(hull, n))
        fail(errc::insufficient_precision,
             "coefficient bound cannot separate hull "
             "membership");
    } else {
      if (m <= v_min)
        fail(errc::insufficient_precision,
             "trailing coefficient bound reaches the "
             "hull minimum");
      right_uncertainty = true;
    }
  }

  if (!f.is_polynomial()) {
    const TailCertificate& t = *f.tail();
    if (t.vrho < 0)
      fail(errc::insufficient_precision,
           "tail rate is negative; hull not certifiable");
    Rat tail_floor = t.vb + Rat(D + 1) * t.vrho;
    tail_floor.canonicalize();
    if (tail_floor <= Rat(v_min))
      fail(errc::insufficient_precision,
           "tail bound reaches the hull minimum");
  }

  NewtonPolygon np;
  for (const auto& h : hull) np.vertices.emplace_back(h.n, h.v);
  for (size_t i = 0; i + 1 < hull.size(); ++i) {
    Rat g = Rat(hull[i + 1].v - hull[i].v) / Rat(hull[i + 1].n - hull[i].n);
    g.canonicalize();
    np.segments.push_back({-g, hull[i + 1].n - hull[i].n});
  }
  np.certified_min_slope =
      right_uncertainty ? std::optional<Rat>(Rat(0)) : std::nullopt;
  return np;
}

StrassmanBound strassman(const PadicSeries& f) {
  const int D = f.degree();
  if (!f.is_polynomial() && f.tail()->vrho < 0)
    fail(errc::no_certificate,
         "tail rate < 0 does not cover the closed unit disk");

  long m_star = 0;
  long T = -1;
  for (int n = 0; n <= D; ++n) {
    PadicNumber c = f.coeff(n);
    if (!c.is_unit_form()) continue;
    long v = c.valuation();
    if (T < 0 || v < m_star) {
      m_star = v;
      T = n;
    } else if (v == m_star) {
      T = n;
    }
  }

  if (T < 0) {
    StrassmanBound b;
    b.identically_zero_to_prec = true;
    return b;
  }

  for (int n = T + 1; n <= D; ++n) {
    PadicNumber c = f.coeff(n);
    if (c.is_inexact_zero() && c.valuation_lower_bound() <= m_star)
      fail(errc::no_certificate,
           "coefficient beyond T only bounded at or below the "
           "maximal term");
  }
  if (!f.is_polynomial()) {
    const TailCertificate& t = *f.tail();
    Rat tail_floor = t.vb + Rat(D + 1) * t.vrho;
    tail_floor.canonicalize();
    if (tail_floor <= Rat(m_star))
      fail(errc::no_certificate,
           "tail bound reaches the maximal term");
  }

  StrassmanBound b;
  b.T = T;
  b.min_valuation = m_star;
  return b;
}

std::optional<long> hypothetical_strassman_T(const PadicSeries& f) {
  const int D = f.degree();
  bool any = false;
  Rat floor(0);
  long T = -1;
  for (int n = 0; n <= D; ++n) {
    PadicNumber c = f.coeff(n);
    if (c.is_unit_form())
      fail(errc::internal,
           "hypothetical_strassman_T expects a series that is zero to "
           "precision");
    if (c.is_exact_zero()) continue;
    Rat m(c.valuation_lower_bound());
    if (!any || m < floor) {
      floor = m;
      T = n;
      any = true;
    } else if (m == floor) {
      T = n;
    }
  }
  if (!f.is_polynomial()) {
    const TailCertificate& t = *f.tail();
    if (t.vrho <= 0) return std::nullopt; // floor attained arbitrarily late
    Rat tail_floor = t.vb + Rat(D + 1) * t.vrho;
    tail_floor.canonicalize();
    if (!any || tail_floor <= floor) {
      // Tail index D+1 is the last possible index at the overall floor.
      if (!any || tail_floor < floor) floor = tail_floor;
      T = D + 1;
      any = true;
    }
  }
  if (!any) return -1; // exactly zero: no coefficient can be nonzero
  return T;
}

std::vector<long> candidate_orbit_indices(const PadicSeries& f,
                                          const PadicNumber& lambda) {
  if (!lambda.is_unit_form() || lambda.valuation() <= 0)
    fail(errc::invalid_input,
         "candidate_orbit_indices requires 0 < |lambda|_p < 1");
  const long vl = lambda.valuation();
  NewtonPolygon np = polygon(f);
  std::vector<long> ks;
  for (const auto& seg : np.segments) {
    if (seg.slope < 0) continue;
    Rat q = seg.slope / Rat(vl);
    q.canonicalize();
    if (q.get_den() != 1) continue;
    if (!q.get_num().fits_slong_p()) continue;
    ks.push_back(q.get_num().get_si());
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

} // namespace padicdyn
