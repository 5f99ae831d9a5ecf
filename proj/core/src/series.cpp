#include "padicdyn/series.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

#include "padicdyn/errors.hpp"

namespace padicdyn {

namespace {

const Rat kSaturated(Int(kAbsPrecInf / 4), 1);

// Lower bound on v_p(x); nullopt for an exact zero.
VBound vlb(const PadicNumber& x) {
  if (x.is_exact_zero()) return std::nullopt;
  if (x.is_inexact_zero()) return Rat(Int(x.valuation_lower_bound()), 1);
  return Rat(Int(x.valuation()), 1);
}

long rat_floor(const Rat& r) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
  if (!q.fits_slong_p()) return q > 0 ? kAbsPrecInf / 4 : -(kAbsPrecInf / 4);
  return q.get_si();
}

PadicNumber bound_as_inexact(const Prime& p, const Rat& bound) {
  long m = rat_floor(bound);
  if (m > kAbsPrecInf / 4) m = kAbsPrecInf / 4;
  return PadicNumber::inexact_zero(p, m);
}

// Sound tail for indices n > d covering both inputs.
std::optional<TailCertificate> combine_tails(
    int d, const std::optional<TailCertificate>& a,
    const std::optional<TailCertificate>& b) {
  if (!a) return b;
  if (!b) return a;
  Rat rho = std::min(a->vrho, b->vrho);
  Rat va = a->vb + Rat(d + 1) * (a->vrho - rho);
  Rat vb = b->vb + Rat(d + 1) * (b->vrho - rho);
  return TailCertificate{std::min(va, vb), rho};
}

} // namespace

VBound vb_min(const VBound& a, const VBound& b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

VBound vb_add(const VBound& a, const VBound& b) {
  if (!a || !b) return std::nullopt;
  return *a + *b;
}

bool vb_ge(const VBound& a, const Rat& r) { return !a || *a >= r; }

PadicSeries::PadicSeries(const Prime& p, std::vector<PadicNumber> coeffs,
                         std::optional<TailCertificate> tail)
    : p_(p), c_(std::move(coeffs)), tail_(std::move(tail)) {
  if (c_.empty()) c_.push_back(PadicNumber::exact_zero(p_));
  for (const auto& c : c_)
    if (c.p() != p_.value()) fail(errc::incompatible_prime, "series coefficient prime mismatch");
}

PadicSeries PadicSeries::zero(const Prime& p) {
  return PadicSeries(p, {PadicNumber::exact_zero(p)});
}

PadicSeries PadicSeries::constant(const PadicNumber& c) {
  return PadicSeries(c.prime(), {c});
}

PadicSeries PadicSeries::identity(const Prime& p, int prec) {
  return PadicSeries(p, {PadicNumber::exact_zero(p), PadicNumber::one(p, prec)});
}

PadicSeries PadicSeries::monomial(const PadicNumber& c, int n) {
  std::vector<PadicNumber> v((size_t)n + 1, PadicNumber::exact_zero(c.prime()));
  v[(size_t)n] = c;
  return PadicSeries(c.prime(), std::move(v));
}

PadicNumber PadicSeries::coeff(int n) const {
  if (n < 0) fail(errc::internal, "negative series index");
  if (n <= degree()) return c_[(size_t)n];
  if (is_polynomial()) return PadicNumber::exact_zero(p_);
  fail(errc::internal, "coefficient index beyond computed degree of a certified series");
}

VBound PadicSeries::coeff_bound(long n) const {
  if (n <= degree()) return vlb(c_[(size_t)n]);
  if (is_polynomial()) return std::nullopt;
  return tail_->vb + Rat(Int(n), 1) * tail_->vrho;
}

VBound PadicSeries::envelope(const Rat& rate, long from) const {
  VBound best;
  bool any = false;
  for (long n = std::max(from, 0L); n <= degree(); ++n) {
    VBound b = vlb(c_[(size_t)n]);
    if (!b) continue;
    any = true;
    best = vb_min(best, *b - Rat(Int(n), 1) * rate);
  }
  if (tail_) {
    if (tail_->vrho < rate) return std::nullopt; // unbounded below
    long n0 = std::max(from, (long)degree() + 1);
    any = true;
    best = vb_min(best, tail_->vb + Rat(Int(n0), 1) * (tail_->vrho - rate));
  }
  if (!any || !best) return kSaturated;
  return best;
}

std::vector<Rat> PadicSeries::candidate_rates() const {
  std::vector<std::pair<long, Rat>> pts;
  for (long n = 0; n <= degree(); ++n) {
    VBound b = vlb(c_[(size_t)n]);
    if (b) pts.emplace_back(n, *b);
  }
  std::vector<Rat> out;
  out.push_back(Rat(0));
  if (tail_) out.push_back(tail_->vrho);
  // Lower-hull slopes between successive bound points.
  std::vector<std::pair<long, Rat>> hull;
  for (const auto& pt : pts) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      Rat s1 = (b.second - a.second) / Rat(Int(b.first - a.first), 1);
      Rat s2 = (pt.second - b.second) / Rat(Int(pt.first - b.first), 1);
      if (s2 <= s1)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(pt);
  }
  for (size_t i = 1; i < hull.size(); ++i) {
    Rat s = (hull[i].second - hull[i - 1].second) /
            Rat(Int(hull[i].first - hull[i - 1].first), 1);
    out.push_back(s);
    out.push_back(-s);
  }
  std::sort(out.begin(), out.end(), [](const Rat& a, const Rat& b) { return a > b; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool PadicSeries::zero_to_precision() const {
  for (const auto& c : c_)
    if (!c.is_zero_like()) return false;
  return true;
}

PadicSeries operator+(const PadicSeries& a, const PadicSeries& b) {
  if (a.p() != b.p()) fail(errc::incompatible_prime, "series prime mismatch");
  bool cert = a.tail_ || b.tail_;
  // Polynomial coefficients are known at every index, so only certified
  // inputs cap the computable degree.
  int d;
  if (!cert) {
    d = std::max(a.degree(), b.degree());
  } else {
    d = INT_MAX;
    if (a.tail_) d = std::min(d, a.degree());
    if (b.tail_) d = std::min(d, b.degree());
  }
  std::vector<PadicNumber> c;
  c.reserve((size_t)d + 1);
  for (int n = 0; n <= d; ++n) c.push_back(a.coeff(n) + b.coeff(n));
  std::optional<TailCertificate> tail;
  if (cert) {
    // Coefficients of the shorter-kept factor beyond d are folded via its
    // envelope; both inputs are re-expressed at the common rate.
    Rat rho(0);
    bool have_rho = false;
    for (const auto* s : {&a, &b}) {
      if (s->tail_) {
        rho = have_rho ? std::min(rho, s->tail_->vrho) : s->tail_->vrho;
        have_rho = true;
      }
    }
    VBound ea = a.envelope(rho, d + 1);
    VBound eb = b.envelope(rho, d + 1);
    if (!ea || !eb) fail(errc::internal, "tail combination failed");
    tail = TailCertificate{std::min(*ea, *eb) + Rat(d + 1) * rho, rho};
  }
  return PadicSeries(a.p_, std::move(c), tail);
}

PadicSeries PadicSeries::operator-() const {
  std::vector<PadicNumber> c;
  c.reserve(c_.size());
  for (const auto& x : c_) c.push_back(-x);
  return PadicSeries(p_, std::move(c), tail_);
}

PadicSeries operator-(const PadicSeries& a, const PadicSeries& b) { return a + (-b); }

PadicSeries operator*(const PadicSeries& a, const PadicSeries& b) {
  if (a.p() != b.p()) fail(errc::incompatible_prime, "series prime mismatch");
  bool cert = a.tail_ || b.tail_;
  int d;
  if (!cert) {
    d = a.degree() + b.degree();
  } else {
    d = INT_MAX;
    if (a.tail_) d = std::min(d, a.degree());
    if (b.tail_) d = std::min(d, b.degree());
  }
  std::vector<PadicNumber> c((size_t)d + 1, PadicNumber::exact_zero(a.p_));
  for (int i = 0; i <= a.degree() && i <= d; ++i) {
    if (a.c_[(size_t)i].is_exact_zero()) continue;
    for (int j = 0; j <= b.degree() && i + j <= d; ++j) {
      if (b.c_[(size_t)j].is_exact_zero()) continue;
      c[(size_t)(i + j)] = c[(size_t)(i + j)] + a.c_[(size_t)i] * b.c_[(size_t)j];
    }
  }
  std::optional<TailCertificate> tail;
  if (cert) {
    Rat rho(0);
    bool have_rho = false;
    for (const auto* s : {&a, &b}) {
      if (s->tail_) {
        rho = have_rho ? std::min(rho, s->tail_->vrho) : s->tail_->vrho;
        have_rho = true;
      }
    }
    VBound ga = a.envelope(rho, 0);
    VBound gb = b.envelope(rho, 0);
    if (!ga || !gb) fail(errc::internal, "tail combination failed");
    tail = TailCertificate{*ga + *gb, rho};
  }
  return PadicSeries(a.p_, std::move(c), tail);
}

PadicSeries PadicSeries::scaled(const PadicNumber& s) const {
  if (s.is_exact_zero()) return zero(p_);
  std::vector<PadicNumber> c;
  c.reserve(c_.size());
  for (const auto& x : c_) c.push_back(x * s);
  std::optional<TailCertificate> tail = tail_;
  if (tail) tail->vb += *vlb(s);
  return PadicSeries(p_, std::move(c), tail);
}

PadicSeries PadicSeries::scaled_argument(const PadicNumber& a) const {
  if (a.is_exact_zero()) return constant(coeff(0));
  VBound va = vlb(a);
  std::vector<PadicNumber> c;
  c.reserve(c_.size());
  PadicNumber pw = PadicNumber::one(p_, kDefaultPrecision);
  for (int n = 0; n <= degree(); ++n) {
    c.push_back(c_[(size_t)n] * pw);
    pw = pw * a;
  }
  std::optional<TailCertificate> tail = tail_;
  if (tail) tail->vrho += *va;
  return PadicSeries(p_, std::move(c), tail);
}

PadicSeries PadicSeries::shifted(int k) const {
  std::vector<PadicNumber> c((size_t)k, PadicNumber::exact_zero(p_));
  c.insert(c.end(), c_.begin(), c_.end());
  std::optional<TailCertificate> tail = tail_;
  if (tail) tail->vb -= Rat(k) * tail->vrho;
  return PadicSeries(p_, std::move(c), tail);
}

PadicSeries PadicSeries::truncated(int d) const {
  if (d >= degree()) {
    if (is_polynomial() && d > degree()) {
      std::vector<PadicNumber> c = c_;
      c.resize((size_t)d + 1, PadicNumber::exact_zero(p_));
      return PadicSeries(p_, std::move(c), tail_);
    }
    return *this;
  }
  std::vector<PadicNumber> c(c_.begin(), c_.begin() + d + 1);
  Rat rho = tail_ ? tail_->vrho : Rat(0);
  VBound e = envelope(rho, d + 1);
  if (!e) fail(errc::internal, "truncation lost tail bound");
  return PadicSeries(p_, std::move(c),
                     TailCertificate{*e + Rat(d + 1) * rho, rho});
}

PadicNumber PadicSeries::evaluate(const PadicNumber& x) const {
  if (x.p() != p_.value()) fail(errc::incompatible_prime, "evaluation point prime mismatch");
  if (x.is_exact_zero()) return coeff(0);
  PadicNumber sum = PadicNumber::exact_zero(p_);
  PadicNumber pw = PadicNumber::one(p_, kDefaultPrecision);
  for (int n = 0; n <= degree(); ++n) {
    if (!c_[(size_t)n].is_exact_zero()) sum = sum + c_[(size_t)n] * pw;
    pw = pw * x;
  }
  if (tail_) {
    Rat vx = *vlb(x);
    if (tail_->vrho + vx <= 0)
      fail(errc::outside_convergence_disk,
           "tail rate does not dominate the evaluation point");
    Rat bound = tail_->vb + Rat(degree() + 1) * (tail_->vrho + vx);
    sum = sum + bound_as_inexact(p_, bound);
  }
  return sum;
}

PadicSeries PadicSeries::recentered(const PadicNumber& c, int m) const {
  if (c.p() != p_.value()) fail(errc::incompatible_prime, "recenter point prime mismatch");
  if (m < 0) fail(errc::internal, "negative recenter scale");
  VBound vc = vlb(c);
  if (vc && *vc < 0)
    fail(errc::outside_convergence_disk, "recenter point outside the unit disk");
  if (tail_ && tail_->vrho < 0)
    fail(errc::composition_diverges, "cannot recenter past a divergent tail");
  int d = degree();
  // q_j = sum_n C(n,j) c_n c^{n-j}; coefficient of w^j is then q_j p^{mj}.
  std::vector<PadicNumber> cpow((size_t)d + 1, PadicNumber::one(p_, kDefaultPrecision));
  for (int k = 1; k <= d; ++k) cpow[(size_t)k] = cpow[(size_t)k - 1] * c;
  std::optional<PadicNumber> trunc_err;
  if (tail_) trunc_err = bound_as_inexact(p_, tail_->vb + Rat(d + 1) * tail_->vrho);
  std::vector<PadicNumber> out;
  out.reserve((size_t)d + 1);
  PadicNumber pm = PadicNumber::embed_rational(
      Rat(pow_ui(Int(p_.value()), (unsigned long)m)), p_, kDefaultPrecision);
  PadicNumber pmj = PadicNumber::one(p_, kDefaultPrecision);
  for (int j = 0; j <= d; ++j) {
    PadicNumber q = PadicNumber::exact_zero(p_);
    for (int n = j; n <= d; ++n) {
      if (c_[(size_t)n].is_exact_zero()) continue;
      Int binom;
      mpz_bin_uiui(binom.get_mpz_t(), (unsigned long)n, (unsigned long)j);
      PadicNumber term = c_[(size_t)n] * cpow[(size_t)(n - j)];
      q = q + term * PadicNumber::embed_rational(Rat(binom), p_, kDefaultPrecision);
    }
    if (trunc_err) q = q + *trunc_err;
    out.push_back(q * pmj);
    pmj = pmj * pm;
  }
  std::optional<TailCertificate> tail;
  if (tail_) {
    // For j > d: q_j = sum_{n>=j} C(n,j) c_n c^{n-j} has v >= vb + j*vrho
    // (binomials and c-powers are integral), and the p^{mj} factor adds mj.
    tail = TailCertificate{tail_->vb, tail_->vrho + Rat(m)};
  }
  return PadicSeries(p_, std::move(out), tail);
}

PadicSeries PadicSeries::compose(const PadicSeries& g) const {
  if (p() != g.p()) fail(errc::incompatible_prime, "composition prime mismatch");
  if (is_polynomial()) {
    PadicSeries res = constant(coeff(degree()));
    for (int n = degree() - 1; n >= 0; --n)
      res = res * g + constant(coeff(n));
    return res;
  }
  PadicSeries base = *this;
  PadicSeries arg = g;
  PadicNumber c0 = g.coeff(0);
  if (!c0.is_zero_like()) {
    if (c0.valuation() < 0)
      fail(errc::outside_convergence_disk, "composition argument leaves the unit disk");
    base = recentered(c0, 0);
    arg = g - constant(c0);
  }
  // Pick the argument envelope rate giving the strongest certificate for the
  // dropped terms sum_{k > D} b_k arg^k; validity needs vrho_f + vB_arg >= 0.
  int df = base.degree();
  const TailCertificate& tf = *base.tail_;
  std::optional<Rat> best_rate;
  VBound best_env;
  for (const Rat& r : arg.candidate_rates()) {
    VBound e = arg.envelope(r, 0);
    if (!e) continue;
    if (tf.vrho + *e < 0) continue;
    if (!best_rate || r > *best_rate ||
        (r == *best_rate && *e > *best_env)) {
      best_rate = r;
      best_env = e;
    }
  }
  if (!best_rate)
    fail(errc::composition_diverges, "no convergent envelope for composition argument");
  PadicSeries res = constant(base.coeff(df));
  for (int n = df - 1; n >= 0; --n)
    res = res * arg + constant(base.coeff(n));
  // Fold in the truncated part of the outer series.
  Rat err0 = tf.vb + Rat(df + 1) * (tf.vrho + *best_env);
  std::vector<PadicNumber> c;
  c.reserve((size_t)res.degree() + 1);
  for (int n = 0; n <= res.degree(); ++n)
    c.push_back(res.coeff(n) + bound_as_inexact(p_, err0 + Rat(Int(n), 1) * *best_rate));
  std::optional<TailCertificate> tail =
      combine_tails(res.degree(), res.tail_, TailCertificate{err0, *best_rate});
  return PadicSeries(p_, std::move(c), tail);
}

std::string PadicSeries::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int n = 0; n <= degree(); ++n) {
    if (c_[(size_t)n].is_exact_zero() && degree() > 0) continue;
    if (!first) os << " + ";
    os << "(" << c_[(size_t)n].to_string() << ")";
    if (n == 1) os << "*z";
    if (n > 1) os << "*z^" << n;
    first = false;
  }
  if (first) os << "0";
  if (tail_)
    os << " + O(z^" << degree() + 1 << "; vb=" << rational_to_string(tail_->vb)
       << ", rate=" << rational_to_string(tail_->vrho) << ")";
  return os.str();
}

namespace {

// Shared driver for exp/log style sums sum_k s_k t^k with t(0) exactly zero.
PadicSeries power_sum_series(const PadicSeries& t, int degree, bool is_exp,
                              int prec) {
  const Prime& p = t.prime();
  if (!t.coeff(0).is_exact_zero())
    fail(errc::internal, "series exp/log needs an exactly-zero constant term");
  if (!t.is_polynomial() && t.degree() < degree) degree = t.degree();
  Rat s(1, (long)(p.value() - 1));
  // Choose the rate maximizing decay subject to envelope(rate,1) >= 1/(p-1);
  // vertex boundary rates (b_n - s)/n are included as candidates.
  std::vector<Rat> cands = t.candidate_rates();
  for (long n = 1; n <= t.degree(); ++n) {
    VBound b = t.coeff_bound(n);
    if (b) cands.push_back((*b - s) / Rat(Int(n), 1));
  }
  std::sort(cands.begin(), cands.end(), [](const Rat& a, const Rat& b) { return a > b; });
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  std::optional<Rat> rate;
  VBound env;
  for (const Rat& r : cands) {
    VBound e = t.envelope(r, 1);
    if (!e || *e < s) continue;
    rate = r;
    env = e;
    break;
  }
  if (!rate)
    fail(errc::composition_diverges, is_exp
             ? "series exponential does not converge on the certified disk"
             : "series logarithm does not converge on the certified disk");
  PadicSeries tt = t.is_polynomial() && t.degree() > degree ? t.truncated(degree) : t;
  PadicSeries pw = PadicSeries::constant(PadicNumber::one(p, prec));
  PadicSeries acc = PadicSeries::zero(p);
  Int kfact(1);
  for (int k = 0; k <= degree; ++k) {
    if (k > 0) {
      pw = (pw * tt).truncated(degree);
      kfact *= k;
    }
    Rat coef;
    if (is_exp) {
      coef = Rat(1) / Rat(kfact);
    } else {
      if (k == 0) continue;
      coef = Rat((k % 2 == 1) ? 1 : -1, k);
    }
    acc = acc + pw.scaled(PadicNumber::embed_rational(coef, p, prec));
  }
  // Terms with k > degree start at order > degree (t has exact order >= 1),
  // so coefficients up to `degree` are complete; the envelope bound
  // v(c_n) >= env + n*rate holds for every n >= 1 on its own, so intermediate
  // truncation certificates can be discarded.
  std::vector<PadicNumber> c;
  c.reserve((size_t)degree + 1);
  for (int n = 0; n <= degree; ++n) c.push_back(acc.coeff(n));
  return PadicSeries(p, std::move(c), TailCertificate{*env, *rate});
}

} // namespace

PadicSeries exp_series(const PadicSeries& t, int degree, int prec) {
  return power_sum_series(t, degree, true, prec);
}

PadicSeries log1p_series(const PadicSeries& t, int degree, int prec) {
  return power_sum_series(t, degree, false, prec);
}

} // namespace padicdyn
