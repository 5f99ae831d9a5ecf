#include "padicdyn/jordan_power.hpp"

#include <numeric>

#include "padicdyn/errors.hpp"

namespace padicdyn {

namespace {

const Prime& form_prime(const JordanForm& J) {
  if (J.blocks.empty()) fail(errc::invalid_input, "empty Jordan form");
  return J.blocks[0].lambda.prime();
}

PadicSeries embed_unipoly(const UniPolyQ& f, const Prime& p, int prec) {
  std::vector<PadicNumber> cs;
  for (int i = 0; i <= std::max(f.degree(), 0); ++i)
    cs.push_back(PadicNumber::embed_rational(f.coeff(i), p, prec));
  return PadicSeries(p, std::move(cs), std::nullopt);
}

} // namespace

SeriesMatrix::SeriesMatrix(const Prime& p, int n)
    : p_(p), n_(n), e_((size_t)n * n, PadicSeries::zero(p)) {
  if (n < 1) fail(errc::invalid_input, "series matrix dimension must be positive");
}

PadicMatrix SeriesMatrix::evaluate(const PadicNumber& z) const {
  PadicMatrix m(p_, n_);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) m.at(r, c) = at(r, c).evaluate(z);
  return m;
}

SeriesMatrix SeriesMatrix::scaled_argument(const PadicNumber& s) const {
  SeriesMatrix m(p_, n_);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c) m.at(r, c) = at(r, c).scaled_argument(s);
  return m;
}

long choose_d(const JordanForm& J) {
  const Prime& p = form_prime(J);
  long d = 1;
  for (const auto& b : J.blocks) {
    const PadicNumber& l = b.lambda;
    if (!l.is_unit_form() || l.valuation() != 0)
      fail(errc::non_unit_eigenvalue, "eigenvalue is not a p-adic unit");
    long di;
    if (p.value() == 2) {
      // Need lambda^d = 1 mod 4 so that exp/log apply.
      PadicNumber r = l - PadicNumber::one(l.prime());
      di = (r.is_zero_like() || r.valuation() >= 2) ? 1 : 2;
    } else {
      di = (long)teichmuller_order(l);
    }
    d = std::lcm(d, di);
  }
  return d;
}

AnalyticMatrixPower analytic_power(const JordanForm& J, long d, int degree,
                                   int prec) {
  const Prime& p = form_prime(J);
  const long need = p.value() == 2 ? 2 : 1;
  SeriesMatrix entries(p, J.dim());
  int base = 0;
  for (const auto& b : J.blocks) {
    const PadicNumber& l = b.lambda;
    if (!l.is_unit_form() || l.valuation() != 0)
      fail(errc::non_unit_eigenvalue, "eigenvalue is not a p-adic unit");
    PadicNumber ld = padic_pow(l, d);
    PadicNumber delta = ld - PadicNumber::one(p, prec);
    if (delta.is_unit_form() && delta.valuation() < need)
      fail(errc::outside_exp_domain,
           "d does not bring lambda^d close enough to 1 for exp/log");

    // (lambda^d)^z = exp_p(z * log_p(lambda^d)) as a series in z.
    PadicNumber c = log_p(ld);
    PadicSeries expz =
        exp_series(PadicSeries::monomial(c, 1), degree);

    PadicNumber linv = PadicNumber::one(p, prec) / l;
    UniPolyQ qj{{Rat(1)}}; // running falling factorial / j!
    PadicNumber lpow = PadicNumber::one(p, prec);
    for (int j = 0; j < b.size; ++j) {
      if (j > 0) {
        // C(dz, j) = C(dz, j-1) * (dz - (j-1)) / j
        qj = qj * UniPolyQ{{Rat(-(j - 1)), Rat(d)}};
        qj = qj.scaled(Rat(1, j));
        lpow = lpow * linv;
      }
      PadicSeries factor = embed_unipoly(qj, p, prec).scaled(lpow);
      PadicSeries entry = expz * factor;
      for (int r = 0; r + j < b.size; ++r)
        entries.at(base + r, base + r + j) = entry;
    }
    base += b.size;
  }
  return AnalyticMatrixPower{J, (int)d, std::move(entries)};
}

SeriesMatrix rescaled_power(const AnalyticMatrixPower& a, long ell, int prec) {
  const Prime& p = a.entries.prime();
  const long twop = 2 * (long)p.value();
  if (ell < 0 || ell >= twop * a.d)
    fail(errc::invalid_input, "offset must satisfy 0 <= ell < 2pd");
  PadicNumber s = PadicNumber::embed_rational(Rat(twop), p, prec);
  SeriesMatrix inner = a.entries.scaled_argument(s);

  PadicMatrix jl = jordan_matrix(p, a.J, prec).pow((unsigned long)ell);
  const int n = a.entries.dim();
  SeriesMatrix out(p, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      PadicSeries acc = PadicSeries::zero(p);
      for (int k = 0; k < n; ++k) {
        if (jl.at(r, k).is_exact_zero()) continue;
        acc = acc + inner.at(k, c).scaled(jl.at(r, k));
      }
      out.at(r, c) = acc;
    }
  return out;
}

} // namespace padicdyn
