#include "padicdyn/linearize.hpp"

#include <algorithm>
#include <functional>

#include "padicdyn/errors.hpp"

namespace padicdyn {

namespace {

Int rat_ceil(const Rat& q) {
  Int r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return r;
}

// Effectively unbounded validity domain (exactly linear maps).
const Rat kAnyRadius = Rat(-(kAbsPrecInf / 4));

// f minus its constant and linear terms.
MultiSeries perturbation(const MultiSeries& f) {
  MultiSeries r(f.prime(), f.nvars(), f.maxdeg());
  for (const auto& [e, c] : f.terms()) {
    int d = 0;
    for (int v : e) d += v;
    if (d >= 2) r.set(e, c);
  }
  return r;
}

bool is_exactly_linear(const LocalMap& m) {
  for (const auto& fi : m.f)
    for (const auto& [e, c] : fi.terms()) {
      int d = 0;
      for (int v : e) d += v;
      if (d >= 2 && !c.is_exact_zero()) return false;
    }
  return true;
}

// Smallest v_c >= 0 making every rescaled perturbation coefficient integral:
// v(P_m) + (|m|-1) v_c >= 0 for all monomials m of total degree >= 2.
long rescale_valuation(const std::vector<MultiSeries>& pert) {
  Int vc = 0;
  for (const auto& pi : pert)
    for (const auto& [e, c] : pi.terms()) {
      if (c.is_exact_zero()) continue;
      int d = 0;
      for (int v : e) d += v;
      long lb = c.valuation_lower_bound();
      if (lb >= 0) continue;
      Rat need = Rat(-lb) / Rat(d - 1);
      need.canonicalize();
      vc = std::max(vc, rat_ceil(need));
    }
  if (!vc.fits_slong_p()) fail(errc::internal, "rescale valuation overflow");
  return vc.get_si();
}

void check_square(const LocalMap& m) {
  if ((int)m.f.size() != m.g || m.A.dim() != m.g)
    fail(errc::invalid_input, "local map components and matrix disagree on dimension");
  for (const auto& fi : m.f)
    if (fi.nvars() != m.g)
      fail(errc::invalid_input, "local map component has wrong arity");
}

} // namespace

LocalMap make_local_map(std::vector<MultiSeries> comps) {
  if (comps.empty()) fail(errc::invalid_input, "empty local map");
  const Prime p = comps[0].prime();
  int g = (int)comps.size();
  for (const auto& s : comps)
    if (s.nvars() != g || s.prime().value() != p.value())
      fail(errc::invalid_input, "local map components disagree on arity or prime");
  std::vector<int> zero_e(g, 0);
  PadicMatrix A(p, g);
  for (int i = 0; i < g; ++i) {
    if (!comps[i].coeff(zero_e).is_zero_like())
      fail(errc::invalid_input, "local map must fix the origin");
    for (int j = 0; j < g; ++j) A.at(i, j) = comps[i].linear_coeff(j);
  }
  return LocalMap{p, g, std::move(comps), std::move(A)};
}

LocalMap make_local_map(const Prime& p, const std::vector<MultiPolyQ>& comps,
                        int maxdeg, int prec) {
  if (comps.empty()) fail(errc::invalid_input, "empty local map");
  int g = (int)comps.size();
  int cap = maxdeg;
  for (const auto& f : comps) cap = std::max(cap, f.total_degree());
  std::vector<MultiSeries> fs;
  for (const auto& f : comps) {
    if (f.nvars() != g) fail(errc::invalid_input, "component arity mismatch");
    fs.push_back(embed_poly(f, p, cap, prec));
  }
  return make_local_map(std::move(fs));
}

Conjugacy linearize_attracting(const LocalMap& m, int degree) {
  check_square(m);
  const Prime& p = m.p;
  const PadicNumber lambda = m.A.at(0, 0);
  for (int i = 0; i < m.g; ++i)
    for (int j = 0; j < m.g; ++j) {
      const PadicNumber& a = m.A.at(i, j);
      if (i == j) {
        if (!(a - lambda).is_zero_like())
          fail(errc::not_homothety, "diagonal entries of the linear part differ");
      } else if (!a.is_zero_like()) {
        fail(errc::not_homothety, "linear part has a nonzero off-diagonal entry");
      }
    }
  if (lambda.is_zero_like())
    fail(errc::zero_multiplier, "multiplier is zero to working precision");
  const long vl = lambda.valuation();
  if (vl <= 0)
    fail(errc::unsupported_regime,
         "attracting regime requires 0 < |lambda|_p < 1");

  std::vector<MultiSeries> pert;
  for (const auto& fi : m.f) pert.push_back(perturbation(fi));

  if (is_exactly_linear(m)) {
    std::vector<MultiSeries> h;
    for (int i = 0; i < m.g; ++i)
      h.push_back(MultiSeries::variable(p, m.g, degree, i));
    return Conjugacy{std::move(h), kAnyRadius,
                     ConjugacyRegime::attracting_homothety,
                     CertificateKind::rigorous};
  }

  // Divisors lambda^d - lambda, d = 2..degree, all of valuation exactly
  // v_p(lambda) because lambda^{d-1} - 1 is a unit.
  std::vector<PadicNumber> inv_div;
  inv_div.reserve(std::max(0, degree - 1));
  for (int d = 2; d <= degree; ++d) {
    PadicNumber div = padic_pow(lambda, d) - lambda;
    if (!div.is_unit_form() || div.valuation() != vl)
      fail(errc::internal, "divisor valuation deviates from v_p(lambda)");
    inv_div.push_back(PadicNumber::one(p) / div);
  }

  std::vector<MultiSeries> h;
  for (int i = 0; i < m.g; ++i)
    h.push_back(MultiSeries::variable(p, m.g, degree, i));
  for (int pass = 2; pass <= degree; ++pass) {
    std::vector<MultiSeries> next;
    for (int i = 0; i < m.g; ++i) {
      MultiSeries q = pert[i].compose(h);
      MultiSeries hi = MultiSeries::variable(p, m.g, degree, i);
      for (const auto& [e, c] : q.terms()) {
        int d = 0;
        for (int v : e) d += v;
        if (d < 2) {
          if (!c.is_zero_like())
            fail(errc::internal, "perturbation composition has low-order terms");
          continue;
        }
        hi.set(e, c * inv_div[d - 2]);
      }
      next.push_back(std::move(hi));
    }
    h = std::move(next);
  }

  Rat radius = Rat(vl + rescale_valuation(pert));
  return Conjugacy{std::move(h), radius, ConjugacyRegime::attracting_homothety,
                   CertificateKind::rigorous};
}

std::pair<Conjugacy, SmallDivisorReport>
linearize_indifferent(const LocalMap& m, int e_max, int degree) {
  check_square(m);
  const Prime& p = m.p;
  std::vector<PadicNumber> lam;
  for (int i = 0; i < m.g; ++i) {
    for (int j = 0; j < m.g; ++j)
      if (i != j && !m.A.at(i, j).is_zero_like())
        fail(errc::unsupported_regime,
             "indifferent regime requires a diagonal linear part");
    const PadicNumber& li = m.A.at(i, i);
    if (!li.is_unit_form() || li.valuation() != 0)
      fail(errc::non_unit_eigenvalue, "eigenvalue is not a p-adic unit");
    lam.push_back(li);
  }

  const int pow_cap = std::max(e_max, degree);
  std::vector<std::vector<PadicNumber>> pw(m.g);
  for (int i = 0; i < m.g; ++i) {
    pw[i].push_back(PadicNumber::one(p));
    for (int k = 1; k <= pow_cap; ++k)
      pw[i].push_back(pw[i].back() * lam[i]);
  }
  auto lambda_pow = [&](const std::vector<int>& e) {
    PadicNumber r = PadicNumber::one(p);
    for (int i = 0; i < m.g; ++i)
      if (e[i] > 0) r = r * pw[i][e[i]];
    return r;
  };

  // Finite multiplicative-independence verification through degree e_max.
  SmallDivisorReport report;
  report.checked_degree = e_max;
  bool have_min = false;
  std::vector<int> e(m.g, 0);
  auto visit = [&](const std::vector<int>& ee) {
    PadicNumber le = lambda_pow(ee);
    for (int i = 0; i < m.g; ++i) {
      PadicNumber div = le - lam[i];
      if (div.is_zero_like())
        fail(errc::multiplicative_relation_found,
             "lambda^e - lambda_i vanishes to working precision; hypothesis "
             "fails at checked degree");
      long v = div.valuation();
      report.witnesses.push_back({ee, i, v});
      if (!have_min || Rat(v) < report.min_divisor_valuation) {
        report.min_divisor_valuation = Rat(v);
        have_min = true;
      }
    }
  };
  // Odometer over exponent vectors with 2 <= sum <= e_max.
  std::function<void(int, int)> rec = [&](int idx, int remaining) {
    if (idx == m.g - 1) {
      for (int k = 0; k <= remaining; ++k) {
        e[idx] = k;
        int total = 0;
        for (int v : e) total += v;
        if (total >= 2) visit(e);
      }
      e[idx] = 0;
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      e[idx] = k;
      rec(idx + 1, remaining - k);
    }
    e[idx] = 0;
  };
  rec(0, e_max);
  if (!have_min) report.min_divisor_valuation = Rat(0);

  std::vector<MultiSeries> pert;
  for (const auto& fi : m.f) pert.push_back(perturbation(fi));

  std::vector<MultiSeries> h;
  for (int i = 0; i < m.g; ++i)
    h.push_back(MultiSeries::variable(p, m.g, degree, i));
  if (!is_exactly_linear(m)) {
    for (int pass = 2; pass <= degree; ++pass) {
      std::vector<MultiSeries> next;
      for (int i = 0; i < m.g; ++i) {
        MultiSeries q = pert[i].compose(h);
        MultiSeries hi = MultiSeries::variable(p, m.g, degree, i);
        for (const auto& [ee, c] : q.terms()) {
          int d = 0;
          for (int v : ee) d += v;
          if (d < 2) {
            if (!c.is_zero_like())
              fail(errc::internal, "perturbation composition has low-order terms");
            continue;
          }
          PadicNumber div = lambda_pow(ee) - lam[i];
          if (div.is_zero_like())
            fail(errc::multiplicative_relation_found,
                 "divisor vanishes to working precision while solving");
          hi.set(ee, c / div);
        }
        next.push_back(std::move(hi));
      }
      h = std::move(next);
    }
  }

  // Heuristic validity: v(x) > max over computed coefficients of
  // -v(h_e)/(|e|-1), clamped into the unit polydisk.
  Rat radius(0);
  bool linear_only = true;
  for (int i = 0; i < m.g; ++i)
    for (const auto& [ee, c] : h[i].terms()) {
      int d = 0;
      for (int v : ee) d += v;
      if (d < 2 || c.is_exact_zero()) continue;
      linear_only = false;
      Rat r = Rat(-c.valuation_lower_bound()) / Rat(d - 1);
      r.canonicalize();
      radius = std::max(radius, r);
    }
  if (linear_only) radius = kAnyRadius;

  Conjugacy c{std::move(h), radius, ConjugacyRegime::indifferent_diagonal,
              CertificateKind::heuristic};
  return {std::move(c), std::move(report)};
}

ResidualReport verify_conjugacy(const LocalMap& m, const Conjugacy& c, int degree) {
  check_square(m);
  const Prime& p = m.p;
  int cap = degree;
  for (const auto& hi : c.h) cap = std::min(cap, hi.maxdeg());

  std::vector<MultiSeries> h_capped;
  for (const auto& hi : c.h) h_capped.push_back(hi.truncated(cap));

  std::vector<MultiSeries> lin;
  for (int i = 0; i < m.g; ++i) {
    MultiSeries li = MultiSeries::zero(p, m.g, cap);
    for (int j = 0; j < m.g; ++j) {
      std::vector<int> ej(m.g, 0);
      ej[j] = 1;
      li.set(ej, m.A.at(i, j));
    }
    lin.push_back(std::move(li));
  }

  ResidualReport rep;
  rep.zero_to_precision = true;
  rep.min_valuation_bound = kAbsPrecInf;
  rep.through_degree = cap;
  for (int i = 0; i < m.g; ++i) {
    MultiSeries resid = m.f[i].compose(h_capped) - c.h[i].compose(lin);
    for (const auto& [e, cc] : resid.terms()) {
      if (!cc.is_zero_like()) rep.zero_to_precision = false;
      rep.min_valuation_bound =
          std::min(rep.min_valuation_bound, cc.valuation_lower_bound());
    }
  }
  return rep;
}

} // namespace padicdyn
