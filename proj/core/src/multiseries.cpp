#include "padicdyn/multiseries.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "padicdyn/errors.hpp"

namespace padicdyn {

namespace {

int total_degree(const std::vector<int>& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

void check_compatible(const MultiSeries& a, const MultiSeries& b) {
  if (a.prime().value() != b.prime().value() || a.nvars() != b.nvars())
    fail(errc::internal, "multiseries operands disagree on prime or arity");
}

} // namespace

MultiSeries::MultiSeries(const Prime& p, int g, int maxdeg)
    : p_(p), g_(g), maxdeg_(maxdeg) {
  if (g < 1) fail(errc::invalid_input, "multiseries needs at least one variable");
  if (maxdeg < 0) fail(errc::invalid_input, "multiseries degree cap must be nonnegative");
}

MultiSeries MultiSeries::zero(const Prime& p, int g, int maxdeg) {
  return MultiSeries(p, g, maxdeg);
}

MultiSeries MultiSeries::variable(const Prime& p, int g, int maxdeg, int i, int prec) {
  if (i < 0 || i >= g) fail(errc::invalid_input, "variable index out of range");
  MultiSeries s(p, g, maxdeg);
  std::vector<int> e(g, 0);
  e[i] = 1;
  s.set(e, PadicNumber::one(p, prec));
  return s;
}

MultiSeries MultiSeries::constant(const Prime& p, int g, int maxdeg,
                                  const PadicNumber& c) {
  MultiSeries s(p, g, maxdeg);
  s.set(std::vector<int>(g, 0), c);
  return s;
}

PadicNumber MultiSeries::coeff(const std::vector<int>& e) const {
  auto it = terms_.find(e);
  if (it != terms_.end()) return it->second;
  return PadicNumber::exact_zero(p_);
}

void MultiSeries::set(const std::vector<int>& e, const PadicNumber& c) {
  if ((int)e.size() != g_) fail(errc::internal, "exponent arity mismatch");
  for (int x : e)
    if (x < 0) fail(errc::internal, "negative exponent");
  if (total_degree(e) > maxdeg_) return; // truncated away
  if (c.is_exact_zero()) {
    terms_.erase(e);
    return;
  }
  terms_.insert_or_assign(e, c);
}

MultiSeries operator+(const MultiSeries& a, const MultiSeries& b) {
  check_compatible(a, b);
  MultiSeries r(a.prime(), a.nvars(), std::min(a.maxdeg(), b.maxdeg()));
  for (const auto& [e, c] : a.terms_) r.set(e, c);
  for (const auto& [e, c] : b.terms_) r.set(e, r.coeff(e) + c);
  return r;
}

MultiSeries operator-(const MultiSeries& a, const MultiSeries& b) {
  return a + (-b);
}

MultiSeries MultiSeries::operator-() const {
  MultiSeries r(p_, g_, maxdeg_);
  for (const auto& [e, c] : terms_) r.set(e, -c);
  return r;
}

MultiSeries operator*(const MultiSeries& a, const MultiSeries& b) {
  check_compatible(a, b);
  MultiSeries r(a.prime(), a.nvars(), std::min(a.maxdeg(), b.maxdeg()));
  for (const auto& [ea, ca] : a.terms_) {
    int da = total_degree(ea);
    for (const auto& [eb, cb] : b.terms_) {
      if (da + total_degree(eb) > r.maxdeg()) continue;
      std::vector<int> e(r.nvars());
      for (int i = 0; i < r.nvars(); ++i) e[i] = ea[i] + eb[i];
      r.set(e, r.coeff(e) + ca * cb);
    }
  }
  return r;
}

MultiSeries MultiSeries::scaled(const PadicNumber& s) const {
  MultiSeries r(p_, g_, maxdeg_);
  for (const auto& [e, c] : terms_) r.set(e, c * s);
  return r;
}

MultiSeries MultiSeries::truncated(int d) const {
  MultiSeries r(p_, g_, std::min(d, maxdeg_));
  for (const auto& [e, c] : terms_) r.set(e, c);
  return r;
}

MultiSeries MultiSeries::scaled_arguments(const std::vector<PadicNumber>& a) const {
  if ((int)a.size() != g_) fail(errc::invalid_input, "argument arity mismatch");
  MultiSeries r(p_, g_, maxdeg_);
  for (const auto& [e, c] : terms_) {
    PadicNumber f = c;
    for (int i = 0; i < g_; ++i)
      if (e[i] > 0) f = f * padic_pow(a[i], e[i]);
    r.set(e, f);
  }
  return r;
}

PadicSeries MultiSeries::along_ray(const std::vector<PadicNumber>& a) const {
  if ((int)a.size() != g_) fail(errc::invalid_input, "argument arity mismatch");
  std::vector<PadicNumber> cs(maxdeg_ + 1, PadicNumber::exact_zero(p_));
  for (const auto& [e, c] : terms_) {
    PadicNumber f = c;
    for (int i = 0; i < g_; ++i)
      if (e[i] > 0) f = f * padic_pow(a[i], e[i]);
    int n = total_degree(e);
    cs[n] = cs[n] + f;
  }
  return PadicSeries(p_, std::move(cs), std::nullopt);
}

PadicNumber MultiSeries::evaluate(const std::vector<PadicNumber>& x) const {
  if ((int)x.size() != g_) fail(errc::invalid_input, "argument arity mismatch");
  PadicNumber acc = PadicNumber::exact_zero(p_);
  for (const auto& [e, c] : terms_) {
    PadicNumber t = c;
    for (int i = 0; i < g_; ++i)
      if (e[i] > 0) t = t * padic_pow(x[i], e[i]);
    acc = acc + t;
  }
  return acc;
}

MultiSeries MultiSeries::compose(const std::vector<MultiSeries>& args) const {
  if ((int)args.size() != g_) fail(errc::invalid_input, "argument arity mismatch");
  for (const auto& s : args) check_compatible(args[0], s);
  int gv = args[0].nvars();
  int cap = args[0].maxdeg();
  for (const auto& s : args) cap = std::min(cap, s.maxdeg());

  // Memoize powers of each argument.
  std::vector<int> maxexp(g_, 0);
  for (const auto& [e, c] : terms_)
    for (int i = 0; i < g_; ++i) maxexp[i] = std::max(maxexp[i], e[i]);
  std::vector<std::vector<MultiSeries>> pows(g_);
  for (int i = 0; i < g_; ++i) {
    pows[i].push_back(MultiSeries::constant(args[0].prime(), gv, cap,
                                            PadicNumber::one(args[0].prime())));
    for (int k = 1; k <= maxexp[i]; ++k)
      pows[i].push_back(pows[i].back() * args[i]);
  }

  MultiSeries r(args[0].prime(), gv, cap);
  for (const auto& [e, c] : terms_) {
    MultiSeries t = MultiSeries::constant(args[0].prime(), gv, cap, c);
    for (int i = 0; i < g_; ++i)
      if (e[i] > 0) t = t * pows[i][e[i]];
    r = r + t;
  }
  return r;
}

PadicNumber MultiSeries::linear_coeff(int j) const {
  std::vector<int> e(g_, 0);
  e[j] = 1;
  return coeff(e);
}

bool MultiSeries::zero_to_precision() const {
  for (const auto& [e, c] : terms_)
    if (!c.is_zero_like()) return false;
  return true;
}

std::string MultiSeries::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.to_string() << ")";
    for (int i = 0; i < g_; ++i) {
      if (e[i] == 0) continue;
      os << "*x" << i;
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

MultiSeries embed_poly(const MultiPolyQ& f, const Prime& p, int maxdeg, int prec) {
  MultiSeries r(p, f.nvars(), maxdeg);
  for (const auto& [e, c] : f.terms())
    r.set(e, PadicNumber::embed_rational(c, p, prec));
  return r;
}

MultiSeries evaluate_poly(const MultiPolyQ& f, const std::vector<MultiSeries>& x) {
  if ((int)x.size() != f.nvars()) fail(errc::invalid_input, "argument arity mismatch");
  const Prime& p = x[0].prime();
  MultiSeries lifted(p, f.nvars(), std::max(f.total_degree(), 0));
  for (const auto& [e, c] : f.terms())
    lifted.set(e, PadicNumber::embed_rational(c, p));
  return lifted.compose(x);
}

PadicSeries evaluate_poly(const MultiPolyQ& f, const std::vector<PadicSeries>& x) {
  if ((int)x.size() != f.nvars()) fail(errc::invalid_input, "argument arity mismatch");
  const Prime& p = x[0].prime();
  PadicSeries acc = PadicSeries::zero(p);
  for (const auto& [e, c] : f.terms()) {
    PadicSeries t = PadicSeries::constant(PadicNumber::embed_rational(c, p));
    for (size_t i = 0; i < x.size(); ++i)
      for (int k = 0; k < e[i]; ++k) t = t * x[i];
    acc = acc + t;
  }
  return acc;
}

std::vector<MultiSeries> invert_tuple(const std::vector<MultiSeries>& h) {
  if (h.empty()) fail(errc::invalid_input, "empty tuple");
  const Prime& p = h[0].prime();
  int g = (int)h.size();
  int cap = h[0].maxdeg();
  for (const auto& s : h) {
    check_compatible(h[0], s);
    cap = std::min(cap, s.maxdeg());
  }
  if (h[0].nvars() != g)
    fail(errc::invalid_input, "tuple must be square (g series in g variables)");

  // Verify linear part is the identity and split off the higher-order part.
  std::vector<MultiSeries> pert;
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      PadicNumber lij = h[i].linear_coeff(j);
      PadicNumber expect = (i == j) ? PadicNumber::one(p) : PadicNumber::exact_zero(p);
      if (!(lij - expect).is_zero_like())
        fail(errc::internal, "tuple inverse requires identity linear part");
    }
    std::vector<int> zero_e(g, 0);
    if (!h[i].coeff(zero_e).is_zero_like())
      fail(errc::internal, "tuple inverse requires zero constant term");
    MultiSeries pi(p, g, cap);
    for (const auto& [e, c] : h[i].terms()) {
      int d = 0;
      for (int v : e) d += v;
      if (d >= 2) pi.set(e, c);
    }
    pert.push_back(pi);
  }

  // g <- y - P(g); each pass extends correctness by one total degree.
  std::vector<MultiSeries> inv;
  for (int i = 0; i < g; ++i) inv.push_back(MultiSeries::variable(p, g, cap, i));
  for (int pass = 2; pass <= cap; ++pass) {
    std::vector<MultiSeries> next;
    for (int i = 0; i < g; ++i)
      next.push_back(MultiSeries::variable(p, g, cap, i) - pert[i].compose(inv));
    inv = std::move(next);
  }
  return inv;
}

} // namespace padicdyn
