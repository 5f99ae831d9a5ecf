#include "padicdyn/dml.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "padicdyn/dichotomy.hpp"
#include "padicdyn/errors.hpp"
#include "padicdyn/jordan_power.hpp"
#include "padicdyn/multiseries.hpp"
#include "padicdyn/newton.hpp"

namespace padicdyn {
namespace {

constexpr long kPointBitCap = 20000;   // exact orbit point height guard
constexpr long kMaxExactPoints = 200000;
constexpr long kWitnessCap = 2000000;  // modular orbit cache length guard
constexpr long kMaxCandidates = 64;    // periodic-point candidates per period
constexpr long kMaxIterateDegree = 4096;
constexpr long kMaxResidueClasses = 4000;  // indifferent j x ell classes
constexpr int kPrecisionLadder = 3;

long ceil_div(long a, long b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

// Floor clamped to a symmetric window; inputs can be astronomically large
// when a linearization is valid on the whole space.
long floor_to_long(const Rat& x) {
  if (x > Rat(1000000)) return 1000000;
  if (x < Rat(-1000000)) return -1000000;
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return q.get_si();
}

// Valuation as a Rat, capped for zero-like values.
Rat vrat(const PadicNumber& x) {
  if (!x.is_zero_like()) return Rat(x.valuation());
  long b = x.valuation_lower_bound();
  return Rat(std::min<long>(b, 1000000));
}

void validate_orbit(const OrbitProblem& pb) {
  size_t g = pb.maps.size();
  if (g == 0) fail(errc::invalid_input, "no coordinate maps");
  if (pb.alpha.size() != g)
    fail(errc::invalid_input, "start point has wrong dimension");
  for (const auto& F : pb.variety)
    if (F.nvars() != (int)g)
      fail(errc::invalid_input, "variety generator has wrong arity");
  if (pb.bounds.m_max < 1 || pb.bounds.degree < 4 || pb.bounds.precision < 4)
    fail(errc::invalid_input, "degenerate bounds");
}

bool trivial_variety(const std::vector<MultiPolyQ>& v) {
  for (const auto& F : v)
    if (!F.is_zero()) return false;
  return true;
}

ReturnSetDecomposition full_set() {
  ReturnSetDecomposition out = canonicalize({Progression{0, 1}}, {});
  out.certificate = CertificateLevel::rigorous;
  out.period = 1;
  return out;
}

long rat_bits(const Rat& x) {
  return (long)std::max(mpz_sizeinbase(x.get_num().get_mpz_t(), 2),
                        mpz_sizeinbase(x.get_den().get_mpz_t(), 2));
}

uint64_t next_prime_above(uint64_t n) {
  uint64_t q = n + 1;
  if (q <= 2) return 2;
  if (q % 2 == 0) ++q;
  while (!is_prime_u64(q)) q += 2;
  return q;
}

// ---------------------------------------------------------------------------
// Exact orbit prefix under a height guard

class ExactOrbit {
public:
  explicit ExactOrbit(const OrbitProblem& pb) : pb_(pb) {
    pts_.push_back(pb.alpha);
    max_deg_ = 1;
    for (const auto& f : pb.maps) max_deg_ = std::max(max_deg_, (long)f.degree());
  }

  // Exact point, or nullptr once the height guard stops the extension.
  const std::vector<Rat>* point(long n) {
    if (n < 0) fail(errc::invalid_input, "negative orbit index");
    while ((long)pts_.size() <= n) {
      if (guard_ || (long)pts_.size() > kMaxExactPoints) {
        guard_ = true;
        return nullptr;
      }
      const std::vector<Rat>& x = pts_.back();
      long bits = 1;
      for (const auto& c : x) bits = std::max(bits, rat_bits(c));
      if (bits * std::max<long>(max_deg_, 1) > kPointBitCap) {
        guard_ = true;
        return nullptr;
      }
      std::vector<Rat> nx;
      nx.reserve(x.size());
      for (size_t i = 0; i < x.size(); ++i)
        nx.push_back(pb_.maps[i].evaluate(x[i]));
      pts_.push_back(std::move(nx));
    }
    return &pts_[(size_t)n];
  }

private:
  const OrbitProblem& pb_;
  std::vector<std::vector<Rat>> pts_;
  long max_deg_ = 1;
  bool guard_ = false;
};

// ---------------------------------------------------------------------------
// Membership oracle: exact within the height window, then modular witnesses.

class OrbitOracle {
public:
  enum class Tier { no, yes_exact, yes_residue };

  explicit OrbitOracle(const OrbitProblem& pb) : pb_(pb), exact_(pb) {
    uint64_t q = (1ull << 62);
    for (int k = 0; k < 4; ++k) {
      q = next_prime_above(q);
      Witness w;
      w.Q = q;
      w.usable = true;
      for (const auto& f : pb.maps) {
        std::vector<uint64_t> c;
        for (int n = 0; n <= f.degree(); ++n) {
          const Rat& a = f.coeff(n);
          if (positive_mod_u64(a.get_den(), q) == 0) w.usable = false;
          if (!w.usable) break;
          c.push_back(mulmod_u64(positive_mod_u64(a.get_num(), q),
                                 inverse_u64(positive_mod_u64(a.get_den(), q), q), q));
        }
        w.map_c.push_back(std::move(c));
      }
      for (const auto& a : pb.alpha) {
        if (!w.usable) break;
        if (positive_mod_u64(a.get_den(), q) == 0) w.usable = false;
        if (!w.usable) break;
        w.start.push_back(mulmod_u64(positive_mod_u64(a.get_num(), q),
                                     inverse_u64(positive_mod_u64(a.get_den(), q), q), q));
      }
      for (const auto& F : pb.variety) {
        if (!w.usable) break;
        std::map<std::vector<int>, uint64_t> t;
        for (const auto& [e, c] : F.terms()) {
          if (positive_mod_u64(c.get_den(), q) == 0) {
            w.usable = false;
            break;
          }
          uint64_t v = mulmod_u64(positive_mod_u64(abs(c.get_num()), q),
                                  inverse_u64(positive_mod_u64(c.get_den(), q), q), q);
          if (c < 0) v = v ? q - v : 0;
          t.emplace(e, v);
        }
        w.var_c.push_back(std::move(t));
      }
      if (w.usable) w.orbit.push_back(w.start);
      ws_.push_back(std::move(w));
    }
  }

  const std::vector<Rat>* exact_point(long n) { return exact_.point(n); }

  Tier f_vanishes(long n, size_t gi) {
    const std::vector<Rat>* x = exact_.point(n);
    if (x) return pb_.variety[gi].evaluate(*x) == 0 ? Tier::yes_exact : Tier::no;
    return modular(n, (long)gi);
  }

  Tier member(long n) {
    const std::vector<Rat>* x = exact_.point(n);
    if (x) {
      for (const auto& F : pb_.variety)
        if (F.evaluate(*x) != 0) return Tier::no;
      return Tier::yes_exact;
    }
    return modular(n, -1);
  }

  bool f_vanishes_bool(long n, size_t gi) {
    Tier t = f_vanishes(n, gi);
    if (t == Tier::yes_residue) ++residue_uses_;
    return t != Tier::no;
  }

  bool member_bool(long n) {
    Tier t = member(n);
    if (t == Tier::yes_residue) ++residue_uses_;
    return t != Tier::no;
  }

  long residue_uses() const { return residue_uses_; }

private:
  struct Witness {
    uint64_t Q = 0;
    bool usable = false;
    std::vector<std::vector<uint64_t>> map_c;  // per coordinate, low to high
    std::vector<uint64_t> start;
    std::vector<std::map<std::vector<int>, uint64_t>> var_c;
    std::vector<std::vector<uint64_t>> orbit;  // cached states
  };

  // Generator test mod all usable witnesses; gi < 0 means all generators.
  Tier modular(long n, long gi) {
    int usable = 0;
    for (auto& w : ws_) {
      if (!w.usable) continue;
      ++usable;
      extend(w, n);
      const std::vector<uint64_t>& x = w.orbit[(size_t)n];
      for (size_t fi = 0; fi < pb_.variety.size(); ++fi) {
        if (gi >= 0 && fi != (size_t)gi) continue;
        uint64_t sum = 0;
        for (const auto& [e, c] : w.var_c[fi]) {
          uint64_t v = c;
          for (size_t i = 0; i < x.size(); ++i)
            for (int rep = 0; rep < e[i]; ++rep) v = mulmod_u64(v, x[i], w.Q);
          sum = (sum + v) % w.Q;
        }
        if (sum != 0) return Tier::no;
      }
    }
    if (usable == 0)
      fail(errc::bit_growth_exceeded,
           "orbit index " + std::to_string(n) + " beyond the exact window and no usable witness");
    return Tier::yes_residue;
  }

  void extend(Witness& w, long n) {
    if (n > kWitnessCap)
      fail(errc::bit_growth_exceeded,
           "membership query at n = " + std::to_string(n) + " beyond the witness cache");
    while ((long)w.orbit.size() <= n) {
      const std::vector<uint64_t>& x = w.orbit.back();
      std::vector<uint64_t> nx(x.size());
      for (size_t i = 0; i < x.size(); ++i) {
        const std::vector<uint64_t>& c = w.map_c[i];
        uint64_t acc = 0;
        for (size_t k = c.size(); k-- > 0;) acc = (mulmod_u64(acc, x[i], w.Q) + c[k]) % w.Q;
        nx[i] = acc;
      }
      w.orbit.push_back(std::move(nx));
    }
  }

  const OrbitProblem& pb_;
  ExactOrbit exact_;
  std::vector<Witness> ws_;
  long residue_uses_ = 0;
};

// ---------------------------------------------------------------------------
// Hensel lifting of a simple root mod p

Int eval_mod(const UniPolyQ& P, const Int& x, const Int& m) {
  Int acc(0);
  for (int n = P.degree(); n >= 0; --n) {
    acc = (acc * x) % m;
    const Rat& c = P.coeff(n);
    Int num = positive_mod(c.get_num(), m);
    Int den = positive_mod(c.get_den(), m);
    acc = (acc + num * mod_inverse(den, m)) % m;
  }
  return positive_mod(acc, m);
}

Int hensel_lift(const UniPolyQ& P, const UniPolyQ& Pd, uint64_t r0, const Prime& p,
                int prec) {
  Int x((unsigned long)r0);
  long k = 1;
  while (k < prec) {
    long k2 = std::min<long>(2 * k, prec);
    Int pk2 = pow_ui(Int((unsigned long)p.value()), (unsigned long)k2);
    Int fx = eval_mod(P, x, pk2);
    Int dfx = eval_mod(Pd, x, pk2);
    x = positive_mod(x - fx * mod_inverse(dfx, pk2), pk2);
    k = k2;
  }
  return x;
}

bool denominators_unit(const OrbitProblem& pb, uint64_t pv) {
  auto bad = [&](const Rat& r) {
    return mpz_divisible_ui_p(r.get_den().get_mpz_t(), (unsigned long)pv) != 0;
  };
  for (const auto& f : pb.maps)
    for (int n = 0; n <= f.degree(); ++n)
      if (bad(f.coeff(n))) return false;
  for (const auto& a : pb.alpha)
    if (bad(a)) return false;
  for (const auto& F : pb.variety)
    for (const auto& [e, c] : F.terms())
      if (bad(c)) return false;
  return true;
}

}  // namespace

PeriodicPointData find_periodic_point(const OrbitProblem& pb, const Prime& p) {
  validate_orbit(pb);
  if (!denominators_unit(pb, p.value()))
    fail(errc::denominator_divisible_by_p,
         "an input denominator is divisible by " + std::to_string(p.value()));
  size_t g = pb.maps.size();
  int prec = pb.bounds.precision;
  long burn = pb.bounds.burn_in_cap;
  std::vector<std::string> warnings;

  struct Cand {
    long M;
    long approach;
    std::vector<uint64_t> rs;
    std::vector<PadicNumber> beta;
    std::vector<PadicNumber> mult;
    PointClass cls;
    std::vector<std::optional<Rat>> exact;
  };
  std::vector<Cand> found;
  ExactOrbit orbit(pb);

  std::vector<UniPolyQ> comp = pb.maps;  // f_i^M for the current M
  for (long M = 1; M <= pb.bounds.m_max; ++M) {
    if (M > 1) {
      bool too_big = false;
      for (size_t i = 0; i < g; ++i) {
        comp[i] = pb.maps[i].compose(comp[i]);
        if (comp[i].degree() > kMaxIterateDegree) too_big = true;
      }
      if (too_big) {
        warnings.push_back("iterate degree exceeds bound at M = " + std::to_string(M));
        break;
      }
    }
    // Per-coordinate simple roots of f_i^M(t) - t, Hensel-lifted.  A rational
    // root with the same residue coincides with the Hensel root and is kept
    // exactly.
    struct Root {
      uint64_t r;
      PadicNumber z;
      std::optional<Rat> exact;
    };
    std::vector<std::vector<Root>> roots((size_t)g);
    bool coordinate_empty = false;
    for (size_t i = 0; i < g; ++i) {
      UniPolyQ Pi = comp[i] - UniPolyQ::variable();
      if (Pi.is_zero()) {
        warnings.push_back("fixed-point equation degenerates at M = " + std::to_string(M));
        coordinate_empty = true;
        break;
      }
      UniPolyQ Pd = Pi.derivative();
      std::vector<uint64_t> fp = Pi.mod_p(p);
      std::vector<uint64_t> fpd = Pd.mod_p(p);
      std::vector<std::pair<Rat, int>> qroots = Pi.rational_roots();
      for (uint64_t r = 0; r < p.value(); ++r) {
        if (fp_eval(fp, r, p.value()) != 0) continue;
        if (fp_eval(fpd, r, p.value()) == 0) {
          warnings.push_back("root " + std::to_string(r) + " mod p of coordinate " +
                             std::to_string(i) + " at M = " + std::to_string(M) +
                             " is not simple (Hensel obstruction)");
          continue;
        }
        std::optional<Rat> exact;
        for (const auto& [rho, mult] : qroots) {
          if (mpz_divisible_ui_p(rho.get_den().get_mpz_t(), (unsigned long)p.value()))
            continue;
          uint64_t res = mulmod_u64(positive_mod_u64(rho.get_num(), p.value()),
                                    inverse_u64(positive_mod_u64(rho.get_den(), p.value()),
                                                p.value()),
                                    p.value());
          if (res == r) {
            exact = rho;
            break;
          }
        }
        PadicNumber z =
            exact ? PadicNumber::embed_rational(*exact, p, prec)
                  : PadicNumber::embed_rational(Rat(hensel_lift(Pi, Pd, r, p, prec)), p,
                                                prec) +
                        PadicNumber::inexact_zero(p, prec);
        roots[i].push_back({r, std::move(z), std::move(exact)});
      }
      if (roots[i].empty()) {
        coordinate_empty = true;
        break;
      }
    }
    if (coordinate_empty) continue;

    // Cartesian product of coordinate roots.
    long total = 1;
    for (const auto& rl : roots) {
      total *= (long)rl.size();
      if (total > kMaxCandidates) break;
    }
    if (total > kMaxCandidates) {
      warnings.push_back("too many periodic candidates at M = " + std::to_string(M));
      total = kMaxCandidates;
    }
    std::vector<size_t> idx(g, 0);
    for (long cand = 0; cand < total; ++cand) {
      std::vector<PadicNumber> beta;
      std::vector<uint64_t> rs;
      std::vector<std::optional<Rat>> exact;
      for (size_t i = 0; i < g; ++i) {
        beta.push_back(roots[i][idx[i]].z);
        rs.push_back(roots[i][idx[i]].r);
        exact.push_back(roots[i][idx[i]].exact);
      }
      // advance the mixed-radix index
      for (size_t i = 0; i < g; ++i) {
        if (++idx[i] < roots[i].size()) break;
        idx[i] = 0;
      }
      // exact vector period: smallest divisor of M fixing beta to precision
      long period = M;
      {
        std::vector<PadicNumber> y = beta;
        for (long m = 1; m <= M; ++m) {
          for (size_t i = 0; i < g; ++i) y[i] = pb.maps[i].evaluate(y[i]);
          if (M % m == 0) {
            bool back = true;
            for (size_t i = 0; i < g; ++i)
              if (!(y[i] - beta[i]).is_zero_like()) back = false;
            if (back) {
              period = m;
              break;
            }
          }
        }
      }
      if (period < M) continue;  // enumerated at the smaller period already
      // multipliers along the cycle
      std::vector<PadicNumber> mult;
      {
        std::vector<PadicNumber> y = beta;
        std::vector<PadicNumber> acc;
        for (size_t i = 0; i < g; ++i)
          acc.push_back(PadicNumber::one(p, prec));
        for (long m = 0; m < M; ++m) {
          for (size_t i = 0; i < g; ++i)
            acc[i] = acc[i] * pb.maps[i].derivative().evaluate(y[i]);
          for (size_t i = 0; i < g; ++i) y[i] = pb.maps[i].evaluate(y[i]);
        }
        mult = std::move(acc);
      }
      PointClass cls = PointClass::unsupported;
      bool zero_mult = false, all_unit = true, all_contracting = true, all_equal = true;
      for (size_t i = 0; i < g; ++i) {
        if (mult[i].is_zero_like()) zero_mult = true;
        if (zero_mult) break;
        if (mult[i].valuation() != 0) all_unit = false;
        if (mult[i].valuation() < 1) all_contracting = false;
        if (!(mult[i] - mult[0]).is_zero_like()) all_equal = false;
      }
      if (zero_mult) {
        warnings.push_back("zero multiplier at M = " + std::to_string(M));
        continue;
      }
      if (all_contracting && all_equal)
        cls = PointClass::attracting_homothety;
      else if (all_unit)
        cls = PointClass::indifferent_diagonal;
      if (cls == PointClass::unsupported) {
        warnings.push_back("mixed multiplier regime at M = " + std::to_string(M));
        continue;
      }
      // Approach proxy: an attracting orbit must come p-adically close to
      // beta; an indifferent orbit only needs to stay in the unit chart.
      Rat need = cls == PointClass::attracting_homothety ? Rat(1) : Rat(0);
      long approach = -1;
      for (long n = 0; n <= burn; ++n) {
        const std::vector<Rat>* x = orbit.point(n);
        if (!x) break;
        bool close = true;
        for (size_t i = 0; i < g; ++i) {
          PadicNumber d = PadicNumber::embed_rational((*x)[i], p, prec) - beta[i];
          if (vrat(d) < need) close = false;
        }
        if (close) {
          approach = n;
          break;
        }
      }
      if (approach < 0) {
        warnings.push_back("orbit does not approach the period-" + std::to_string(M) +
                           " point with residues mod p " +
                           std::to_string(rs.empty() ? 0 : rs[0]));
        continue;
      }
      found.push_back({M, approach, std::move(rs), std::move(beta), std::move(mult), cls,
                       std::move(exact)});
    }
    if (!found.empty()) break;  // smallest period wins; no need to search further
  }

  if (found.empty()) {
    std::ostringstream os;
    os << "no usable periodic point for p = " << p.value() << " up to period "
       << pb.bounds.m_max;
    if (!warnings.empty()) {
      os << " (" << warnings.size() << " candidates set aside; first: " << warnings.front()
         << ")";
    }
    fail(errc::no_periodic_point_found, os.str());
  }
  std::sort(found.begin(), found.end(), [](const Cand& a, const Cand& b) {
    if (a.M != b.M) return a.M < b.M;
    if (a.approach != b.approach) return a.approach < b.approach;
    return a.rs < b.rs;
  });
  Cand& best = found.front();
  PeriodicPointData out{p,
                        std::move(best.beta),
                        best.M,
                        std::move(best.mult),
                        best.cls,
                        std::move(best.rs),
                        best.approach,
                        std::move(best.exact)};
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Cycle frame: local coordinates and linearizations at every cycle offset.

struct CycleFrame {
  std::vector<std::vector<PadicNumber>> beta;  // [j][i]
  std::vector<Conjugacy> conj;
  std::vector<std::vector<MultiSeries>> hinv;
  // Exact rational cycle points when the periodic point is rational.
  std::vector<std::vector<Rat>> beta_exact;  // empty when unavailable
};

CycleFrame build_frame(const OrbitProblem& pb, const PeriodicPointData& pp,
                       int degree) {
  const Prime& p = pp.p;
  size_t g = pb.maps.size();
  long M = pp.period;
  int prec = pb.bounds.precision;
  CycleFrame fr;
  fr.beta.push_back(pp.beta);
  for (long j = 1; j < M; ++j) {
    std::vector<PadicNumber> nx;
    for (size_t i = 0; i < g; ++i)
      nx.push_back(pb.maps[i].evaluate(fr.beta.back()[i]));
    fr.beta.push_back(std::move(nx));
  }
  bool all_exact = pp.beta_exact.size() == g;
  for (size_t i = 0; all_exact && i < g; ++i)
    if (!pp.beta_exact[i]) all_exact = false;
  if (all_exact) {
    std::vector<Rat> row;
    for (size_t i = 0; i < g; ++i) row.push_back(*pp.beta_exact[i]);
    fr.beta_exact.push_back(row);
    for (long j = 1; j < M; ++j) {
      std::vector<Rat> nx;
      for (size_t i = 0; i < g; ++i)
        nx.push_back(pb.maps[i].evaluate(fr.beta_exact.back()[i]));
      fr.beta_exact.push_back(std::move(nx));
    }
  }
  // One-step local series s_{j,i}(x) = f_i(beta_{j,i} + x) - beta_{j+1,i}.
  std::vector<std::vector<PadicSeries>> step((size_t)M);
  for (long j = 0; j < M; ++j) {
    const auto& bj = fr.beta[(size_t)j];
    const auto& bn = fr.beta[(size_t)((j + 1) % M)];
    for (size_t i = 0; i < g; ++i) {
      PadicSeries inner =
          PadicSeries::constant(bj[i]) + PadicSeries::identity(p, prec);
      PadicSeries s = pb.maps[i].evaluate(inner) - PadicSeries::constant(bn[i]);
      step[(size_t)j].push_back(std::move(s));
    }
  }
  for (long j = 0; j < M; ++j) {
    // Return map around the cycle starting at offset j, one coordinate at a
    // time, truncated at the working degree.
    std::vector<MultiSeries> comps;
    for (size_t i = 0; i < g; ++i) {
      PadicSeries G = step[(size_t)j][i];
      for (long m = 1; m < M; ++m)
        G = step[(size_t)((j + m) % M)][i].compose(G).truncated(degree);
      MultiSeries c = MultiSeries::zero(p, (int)g, degree);
      for (int n = 1; n <= std::min(G.degree(), degree); ++n) {
        std::vector<int> e((size_t)g, 0);
        e[i] = n;
        c.set(e, G.coeff(n));
      }
      comps.push_back(std::move(c));
    }
    LocalMap local = make_local_map(std::move(comps));
    if (pp.classification == PointClass::attracting_homothety) {
      fr.conj.push_back(linearize_attracting(local, degree));
    } else {
      auto [c, rep] = linearize_indifferent(local, pb.bounds.e_max, degree);
      fr.conj.push_back(std::move(c));
    }
    fr.hinv.push_back(invert_tuple(fr.conj.back().h));
  }
  return fr;
}

long enter_basin_frame(const OrbitProblem& pb, const CycleFrame& fr,
                       ExactOrbit& orbit, const Prime& p) {
  size_t g = pb.maps.size();
  long M = (long)fr.beta.size();
  int prec = pb.bounds.precision;
  for (long N = 0; N <= pb.bounds.burn_in_cap; ++N) {
    bool ok = true;
    for (long j = 0; j < M && ok; ++j) {
      const std::vector<Rat>* x = orbit.point(N + j);
      if (!x)
        fail(errc::basin_not_reached,
             "exact orbit window exhausted before reaching the basin");
      for (size_t i = 0; i < g; ++i) {
        PadicNumber d =
            PadicNumber::embed_rational((*x)[i], p, prec) - fr.beta[(size_t)j][i];
        if (!(vrat(d) > fr.conj[(size_t)j].radius_valuation)) ok = false;
      }
    }
    if (ok) return N;
  }
  fail(errc::basin_not_reached,
       "orbit does not enter the certified polydisk within the burn-in cap");
}

// Linearized coordinates of the orbit point at index n0, with the analytic
// truncation slack of the inverse tuple folded into the precision.
std::vector<PadicNumber> linearized_coordinates(const CycleFrame& fr, long j,
                                                const std::vector<Rat>& x,
                                                const Prime& p, int prec,
                                                int degree) {
  size_t g = x.size();
  std::vector<PadicNumber> diff;
  for (size_t i = 0; i < g; ++i)
    diff.push_back(PadicNumber::embed_rational(x[i], p, prec) -
                   fr.beta[(size_t)j][i]);
  std::vector<PadicNumber> avec;
  for (size_t i = 0; i < g; ++i)
    avec.push_back(fr.hinv[(size_t)j][i].evaluate(diff));
  Rat va(1000000);
  for (const auto& d : diff) va = std::min(va, vrat(d));
  const Rat& rv = fr.conj[(size_t)j].radius_valuation;
  long slack = floor_to_long(rv + Rat(degree + 1) * (va - rv));
  for (auto& a : avec) a = a + PadicNumber::inexact_zero(p, slack);
  return avec;
}

// Replaces the constant coefficient by an exactly-known value; the rest of
// the series and the tail certificate are unchanged.
PadicSeries with_exact_constant(const PadicSeries& f, const Rat& c0, const Prime& p,
                                int prec) {
  std::vector<PadicNumber> c;
  c.push_back(c0 == 0 ? PadicNumber::exact_zero(p)
                      : PadicNumber::embed_rational(c0, p, prec));
  for (int n = 1; n <= f.degree(); ++n) c.push_back(f.coeff(n));
  return PadicSeries(p, std::move(c), f.tail());
}

ReturnSetDecomposition finish(std::vector<Progression> progs, std::vector<long> exc,
                              CertificateLevel cert, uint64_t prime, long d,
                              long period, long burn_in) {
  ReturnSetDecomposition out = canonicalize(std::move(progs), std::move(exc));
  out.certificate = cert;
  out.prime = prime;
  out.d = d;
  out.period = period;
  out.burn_in = burn_in;
  return out;
}

std::optional<ReturnSetDecomposition> attempt_attracting(
    const OrbitProblem& pb, const PeriodicPointData& pp, const CycleFrame& fr,
    long N0, OrbitOracle& oracle, int degree) {
  const Prime& p = pp.p;
  size_t g = pb.maps.size();
  long M = pp.period;
  int prec = pb.bounds.precision;
  const PadicNumber& lambda = pp.multipliers[0];
  long residue_before = oracle.residue_uses();

  std::vector<Progression> progs;
  std::vector<long> exc;
  for (long n = 0; n < N0; ++n)
    if (oracle.member_bool(n)) exc.push_back(n);
  for (long j = 0; j < M; ++j) {
    long n0 = N0 + j;
    const std::vector<Rat>* x = oracle.exact_point(n0);
    if (!x) fail(errc::basin_not_reached, "orbit point unavailable");
    std::vector<PadicNumber> avec =
        linearized_coordinates(fr, j, *x, p, prec, degree);
    Rat va(1000000);
    for (const auto& a : avec) va = std::min(va, vrat(a));
    const Rat& rv = fr.conj[(size_t)j].radius_valuation;
    // Coordinates along the ray z -> h_j(z * avec), with the certified tail
    // v(c_n) >= rv + n (va - rv) inherited from the conjugacy radius.
    std::vector<PadicSeries> xs;
    for (size_t i = 0; i < g; ++i) {
      PadicSeries ray = fr.conj[(size_t)j].h[i].along_ray(avec);
      std::vector<PadicNumber> coeffs;
      for (int n = 0; n <= ray.degree(); ++n) coeffs.push_back(ray.coeff(n));
      PadicSeries certified(p, std::move(coeffs), TailCertificate{rv, va - rv});
      xs.push_back(PadicSeries::constant(fr.beta[(size_t)j][i]) + certified);
    }
    std::vector<PadicSeries> thetas;
    for (const auto& F : pb.variety) thetas.push_back(F.evaluate(xs));
    // The constant term is the generator's value at the cycle point (the
    // z -> 0 limit), exactly computable for a rational cycle.
    if (!fr.beta_exact.empty())
      for (size_t i = 0; i < thetas.size(); ++i)
        thetas[i] = with_exact_constant(
            thetas[i], pb.variety[i].evaluate(fr.beta_exact[(size_t)j]), p, prec);

    std::vector<size_t> nz;
    for (size_t i = 0; i < thetas.size(); ++i)
      if (!thetas[i].zero_to_precision()) nz.push_back(i);
    if (nz.empty()) {
      bool all_zero = true;
      for (size_t i = 0; i < thetas.size() && all_zero; ++i) {
        auto dec = decide_identically_zero(thetas[i], [&](long k) {
          return oracle.f_vanishes_bool(n0 + M * k, i);
        });
        if (!dec || !dec->identically_zero) all_zero = false;
      }
      if (!all_zero) return std::nullopt;
      progs.push_back({n0, M});
      continue;
    }
    // Finitely many returns in this class: zeros of Theta sit at z = lambda^k,
    // so the polygon pins down the candidate exponents.
    std::vector<long> ks;
    try {
      ks = candidate_orbit_indices(thetas[nz[0]], lambda);
    } catch (const error&) {
      return std::nullopt;
    }
    for (long k : ks) {
      long n = n0 + M * k;
      if (oracle.member_bool(n)) exc.push_back(n);
    }
  }
  CertificateLevel cert = oracle.residue_uses() > residue_before
                              ? CertificateLevel::heuristic
                              : CertificateLevel::rigorous;
  return finish(std::move(progs), std::move(exc), cert, p.value(), 0, M, N0);
}

// f with the constant coefficient replaced by an exact zero.
PadicSeries drop_constant(const PadicSeries& f) {
  std::vector<PadicNumber> c;
  c.push_back(PadicNumber::exact_zero(f.prime()));
  for (int n = 1; n <= f.degree(); ++n) c.push_back(f.coeff(n));
  return PadicSeries(f.prime(), std::move(c), f.tail());
}

// h(c + x), expanded exactly over the polynomial part.
MultiSeries shift_multiseries(const MultiSeries& h,
                              const std::vector<PadicNumber>& c) {
  const Prime& p = h.prime();
  int g = h.nvars();
  int D = h.maxdeg();
  // Power tables c_k^t.
  std::vector<std::vector<PadicNumber>> cpow((size_t)g);
  for (int k = 0; k < g; ++k) {
    cpow[(size_t)k].push_back(PadicNumber::one(p));
    for (int t = 1; t <= D; ++t)
      cpow[(size_t)k].push_back(cpow[(size_t)k].back() * c[(size_t)k]);
  }
  // Binomial table.
  std::vector<std::vector<Int>> bin((size_t)D + 1);
  for (int n = 0; n <= D; ++n) {
    bin[(size_t)n].resize((size_t)n + 1);
    for (int k = 0; k <= n; ++k) {
      Int b;
      mpz_bin_uiui(b.get_mpz_t(), (unsigned long)n, (unsigned long)k);
      bin[(size_t)n][(size_t)k] = b;
    }
  }
  MultiSeries out = MultiSeries::zero(p, g, D);
  std::vector<int> m((size_t)g, 0);
  for (const auto& [e, coef] : h.terms()) {
    // expand prod_k (c_k + x_k)^{e_k}
    std::fill(m.begin(), m.end(), 0);
    while (true) {
      PadicNumber term = coef;
      for (int k = 0; k < g; ++k) {
        int ek = e[(size_t)k], mk = m[(size_t)k];
        term = term * PadicNumber::embed_rational(Rat(bin[(size_t)ek][(size_t)mk]), p,
                                                  kDefaultPrecision);
        term = term * cpow[(size_t)k][(size_t)(ek - mk)];
      }
      out.set(m, out.coeff(m) + term);
      // next multi-index with m <= e
      int k = 0;
      while (k < g) {
        if (++m[(size_t)k] <= e[(size_t)k]) break;
        m[(size_t)k] = 0;
        ++k;
      }
      if (k == g) break;
    }
  }
  return out;
}

std::optional<ReturnSetDecomposition> attempt_indifferent(
    const OrbitProblem& pb, const PeriodicPointData& pp, const CycleFrame& fr,
    long N0, OrbitOracle& oracle, int degree) {
  const Prime& p = pp.p;
  size_t g = pb.maps.size();
  long M = pp.period;
  int prec = pb.bounds.precision;
  long residue_before = oracle.residue_uses();
  (void)residue_before;  // indifferent results stay heuristic regardless

  JordanForm J;
  for (size_t i = 0; i < g; ++i) J.blocks.push_back({pp.multipliers[i], 1});
  J.basis = PadicMatrix::identity(p, (int)g, prec);
  J.basis_inv = PadicMatrix::identity(p, (int)g, prec);
  long d = choose_d(J);
  long Dl = 2 * (long)p.value() * d;
  long stride = M * Dl;
  if (M * Dl > kMaxResidueClasses)
    fail(errc::unsupported_regime,
         "residue class count " + std::to_string(M * Dl) + " too large");
  AnalyticMatrixPower ap = analytic_power(J, d, degree, prec);
  Rat rho2 = Rat(2) - Rat(1, (long)p.value() - 1 > 0 ? (long)p.value() - 1 : 1);

  std::vector<Progression> progs;
  std::vector<long> exc;
  for (long n = 0; n < N0; ++n)
    if (oracle.member_bool(n)) exc.push_back(n);
  for (long j = 0; j < M; ++j) {
    long base = N0 + j;
    const std::vector<Rat>* x = oracle.exact_point(base);
    if (!x) fail(errc::basin_not_reached, "orbit point unavailable");
    std::vector<PadicNumber> avec =
        linearized_coordinates(fr, j, *x, p, prec, degree);
    Rat va(1000000);
    for (const auto& a : avec) va = std::min(va, vrat(a));
    const Rat& rv = fr.conj[(size_t)j].radius_valuation;
    Rat B1 = rv + Rat(degree + 1) * (va - rv);
    for (long ell = 0; ell < Dl; ++ell) {
      long n0 = N0 + j + M * ell;
      SeriesMatrix S = rescaled_power(ap, ell, prec);
      // Linearized coordinates along the class: lambda_i^(ell + Dl w) a_i,
      // split into the constant at w = 0 and the constant-free remainder.
      std::vector<PadicNumber> cvec;
      std::vector<MultiSeries> args;
      for (size_t i = 0; i < g; ++i) {
        PadicSeries inner = S.at((int)i, (int)i).scaled(avec[i]);
        cvec.push_back(inner.coeff(0));
        MultiSeries mi = MultiSeries::zero(p, 1, degree);
        for (int n = 1; n <= std::min(inner.degree(), degree); ++n)
          mi.set({n}, inner.coeff(n));
        args.push_back(std::move(mi));
      }
      std::vector<PadicSeries> xs;
      for (size_t i = 0; i < g; ++i) {
        // h_i(c + delta(w)): shift the conjugacy, then compose with the
        // constant-free part; the dropped tail contributes v >= B1 + n rho2.
        MultiSeries shifted = shift_multiseries(fr.conj[(size_t)j].h[i], cvec);
        MultiSeries comp = shifted.compose(args);
        std::vector<PadicNumber> coeffs;
        for (int n = 0; n <= degree; ++n) {
          PadicNumber cn = comp.coeff({n});
          long errv = floor_to_long(B1 + Rat(n) * rho2);
          coeffs.push_back(cn + PadicNumber::inexact_zero(p, errv));
        }
        PadicSeries Hc(p, std::move(coeffs), TailCertificate{va, rho2});
        xs.push_back(PadicSeries::constant(fr.beta[(size_t)j][i]) + Hc);
      }
      std::vector<PadicSeries> thetas;
      for (const auto& F : pb.variety) thetas.push_back(F.evaluate(xs));
      // The constant term is the generator's value at the orbit point with
      // index n0 (the w = 0 member of the class), exact inside the window.
      if (const std::vector<Rat>* xc = oracle.exact_point(n0))
        for (size_t i = 0; i < thetas.size(); ++i)
          thetas[i] =
              with_exact_constant(thetas[i], pb.variety[i].evaluate(*xc), p, prec);

      std::vector<size_t> nzi;
      for (size_t i = 0; i < thetas.size(); ++i)
        if (!thetas[i].zero_to_precision()) nzi.push_back(i);
      if (nzi.empty()) {
        bool all_zero = true;
        for (size_t i = 0; i < thetas.size() && all_zero; ++i) {
          auto dec = decide_identically_zero(thetas[i], [&](long k) {
            return oracle.f_vanishes_bool(n0 + stride * k, i);
          });
          if (!dec || !dec->identically_zero) all_zero = false;
        }
        if (!all_zero) return std::nullopt;
        progs.push_back({n0, stride});
        continue;
      }
      long bound = std::max<long>(1, ceil_div(pb.bounds.n_max - n0, stride));
      auto scan = integer_zeros(thetas[nzi[0]], bound, [&](long w) {
        return oracle.f_vanishes_bool(n0 + stride * w, nzi[0]);
      });
      if (!scan) return std::nullopt;
      for (long w : scan->zeros) {
        long n = n0 + stride * w;
        if (oracle.member_bool(n)) exc.push_back(n);
      }
    }
  }
  return finish(std::move(progs), std::move(exc), CertificateLevel::heuristic,
                p.value(), d, stride, N0);
}

OrbitProblem with_precision(const OrbitProblem& pb, int prec, int degree) {
  OrbitProblem out = pb;
  out.bounds.precision = prec;
  out.bounds.degree = degree;
  return out;
}

ReturnSetDecomposition solve_attracting_with(const OrbitProblem& pb, const Prime& p,
                                             OrbitOracle& oracle) {
  int prec0 = pb.bounds.precision;
  int deg0 = pb.bounds.degree;
  for (int round = 0; round < kPrecisionLadder; ++round) {
    int prec = prec0 << round;
    int degree = deg0 + round * (deg0 / 2);
    OrbitProblem pbr = with_precision(pb, prec, degree);
    PeriodicPointData pp = find_periodic_point(pbr, p);
    if (pp.classification != PointClass::attracting_homothety)
      fail(errc::unsupported_regime, "periodic point is not an attracting homothety");
    CycleFrame fr = build_frame(pbr, pp, degree);
    ExactOrbit orbit(pbr);
    long N0 = enter_basin_frame(pbr, fr, orbit, p);
    auto r = attempt_attracting(pbr, pp, fr, N0, oracle, degree);
    if (r) return std::move(*r);
  }
  fail(errc::precision_exhausted, "residue classes undecidable after precision ladder");
}

ReturnSetDecomposition solve_indifferent_with(const OrbitProblem& pb, const Prime& p,
                                              OrbitOracle& oracle) {
  int prec0 = pb.bounds.precision;
  int deg0 = pb.bounds.degree;
  for (int round = 0; round < kPrecisionLadder; ++round) {
    int prec = prec0 << round;
    int degree = deg0 + round * (deg0 / 2);
    OrbitProblem pbr = with_precision(pb, prec, degree);
    PeriodicPointData pp = find_periodic_point(pbr, p);
    if (pp.classification != PointClass::indifferent_diagonal)
      fail(errc::unsupported_regime, "periodic point is not indifferent-diagonal");
    CycleFrame fr = build_frame(pbr, pp, degree);
    ExactOrbit orbit(pbr);
    long N0 = enter_basin_frame(pbr, fr, orbit, p);
    auto r = attempt_indifferent(pbr, pp, fr, N0, oracle, degree);
    if (r) return std::move(*r);
  }
  fail(errc::precision_exhausted, "residue classes undecidable after precision ladder");
}

// Exact-cycle detection: answers finite-orbit problems by direct enumeration.
std::optional<ReturnSetDecomposition> preperiodic_decomposition(
    const OrbitProblem& pb, OrbitOracle& oracle) {
  std::map<std::vector<Rat>, long> seen;
  for (long n = 0; n <= pb.bounds.burn_in_cap; ++n) {
    const std::vector<Rat>* x = oracle.exact_point(n);
    if (!x) return std::nullopt;
    auto [it, fresh] = seen.emplace(*x, n);
    if (fresh) continue;
    long n1 = it->second;
    long c = n - n1;
    std::vector<Progression> progs;
    std::vector<long> exc;
    for (long m = 0; m < n; ++m) {
      bool member = true;
      const std::vector<Rat>* y = oracle.exact_point(m);
      for (const auto& F : pb.variety)
        if (F.evaluate(*y) != 0) member = false;
      if (!member) continue;
      if (m < n1)
        exc.push_back(m);
      else
        progs.push_back({m, c});
    }
    return finish(std::move(progs), std::move(exc), CertificateLevel::rigorous, 0, 0,
                  c, n1);
  }
  return std::nullopt;
}

ReturnSetDecomposition brute_force_only(const OrbitProblem& pb, OrbitOracle& oracle) {
  std::vector<long> exc;
  for (long n = 0; n < pb.bounds.n_max; ++n)
    if (oracle.member_bool(n)) exc.push_back(n);
  ReturnSetDecomposition out = finish({}, std::move(exc),
                                      CertificateLevel::brute_force_only, 0, 0, 1, 0);
  out.verified_bound = pb.bounds.n_max;
  return out;
}

void cross_check(const ReturnSetDecomposition& dec, const OrbitProblem& pb,
                 OrbitOracle& oracle) {
  long W = std::min<long>(pb.bounds.n_max, 2000);
  for (long n = 0; n < W; ++n) {
    bool o = oracle.member_bool(n);
    bool m = dec.member(n);
    if (o != m)
      fail(errc::internal, "cross-check mismatch at n = " + std::to_string(n) +
                               " (oracle " + (o ? "member" : "non-member") +
                               ", decomposition " + (m ? "member" : "non-member") + ")");
  }
}

}  // namespace

long enter_basin(const OrbitProblem& pb, const PeriodicPointData& pp) {
  validate_orbit(pb);
  CycleFrame fr = build_frame(pb, pp, pb.bounds.degree);
  ExactOrbit orbit(pb);
  return enter_basin_frame(pb, fr, orbit, pp.p);
}

ReturnSetDecomposition solve_attracting(const OrbitProblem& pb, const Prime& p) {
  validate_orbit(pb);
  OrbitOracle oracle(pb);
  return solve_attracting_with(pb, p, oracle);
}

ReturnSetDecomposition solve_indifferent(const OrbitProblem& pb, const Prime& p) {
  validate_orbit(pb);
  OrbitOracle oracle(pb);
  return solve_indifferent_with(pb, p, oracle);
}

ReturnSetDecomposition solve_orbit(const OrbitProblem& pb) {
  validate_orbit(pb);
  if (trivial_variety(pb.variety)) return full_set();
  OrbitOracle oracle(pb);

  if (auto pre = preperiodic_decomposition(pb, oracle)) {
    cross_check(*pre, pb, oracle);
    return std::move(*pre);
  }

  std::vector<Prime> primes;
  if (pb.prime_hint) {
    primes.push_back(*pb.prime_hint);
  } else {
    for (uint64_t pv = 2; (long)pv <= pb.bounds.p_max; pv = next_prime_above(pv))
      if (denominators_unit(pb, pv)) primes.push_back(Prime(pv));
  }

  std::vector<std::string> diags;
  auto attempt = [&](const char* name,
                     ReturnSetDecomposition (*run)(const OrbitProblem&, const Prime&,
                                                   OrbitOracle&))
      -> std::optional<ReturnSetDecomposition> {
    for (const Prime& p : primes) {
      try {
        ReturnSetDecomposition r = run(pb, p, oracle);
        cross_check(r, pb, oracle);
        return r;
      } catch (const error& e) {
        if (e.code() == errc::internal) throw;  // cross-check faults surface
        diags.push_back(std::string(name) + " p=" + std::to_string(p.value()) + ": " +
                        e.what());
      }
    }
    return std::nullopt;
  };

  OrbitStrategy s = pb.strategy;
  if (s == OrbitStrategy::automatic || s == OrbitStrategy::attracting) {
    auto r = attempt("attracting", [](const OrbitProblem& q, const Prime& p,
                                      OrbitOracle& o) {
      return solve_attracting_with(q, p, o);
    });
    if (r) return std::move(*r);
    if (s == OrbitStrategy::attracting)
      fail(errc::all_strategies_failed, diags.empty() ? "no admissible prime"
                                                      : diags.back());
  }
  if (s == OrbitStrategy::automatic || s == OrbitStrategy::indifferent) {
    auto r = attempt("indifferent", [](const OrbitProblem& q, const Prime& p,
                                       OrbitOracle& o) {
      return solve_indifferent_with(q, p, o);
    });
    if (r) return std::move(*r);
    if (s == OrbitStrategy::indifferent)
      fail(errc::all_strategies_failed, diags.empty() ? "no admissible prime"
                                                      : diags.back());
  }
  if (s == OrbitStrategy::automatic || s == OrbitStrategy::brute_force) {
    try {
      return brute_force_only(pb, oracle);
    } catch (const error& e) {
      diags.push_back(std::string("brute-force: ") + e.what());
    }
  }
  std::ostringstream os;
  os << diags.size() << " strategy attempts failed";
  for (size_t i = 0; i < diags.size() && i < 6; ++i) os << "; " << diags[i];
  fail(errc::all_strategies_failed, os.str());
}

std::vector<char> brute_force_membership(const OrbitProblem& pb, long n_max) {
  validate_orbit(pb);
  OrbitOracle oracle(pb);
  std::vector<char> bits;
  bits.reserve((size_t)std::max<long>(0, n_max));
  for (long n = 0; n < n_max; ++n) bits.push_back(oracle.member_bool(n) ? 1 : 0);
  return bits;
}

}  // namespace padicdyn
