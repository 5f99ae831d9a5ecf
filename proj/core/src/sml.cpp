#include "padicdyn/sml.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <sstream>

#include "padicdyn/dichotomy.hpp"
#include "padicdyn/errors.hpp"
#include "padicdyn/jordan_power.hpp"

namespace padicdyn {
namespace {

constexpr long kExpandBitCap = 2000000;  // exact torus value expansion
constexpr long kIterBitCap = 4000000;    // exact linear orbit entries
constexpr long kMaxClasses = 20000;      // residue classes per solve
constexpr long kPeriodScanCap = 200000;  // matrix power cycle detection
constexpr int kPrecisionLadder = 3;      // precision doublings before giving up

long ceil_div(long a, long b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }

// ---------------------------------------------------------------------------
// Validation

void validate_linear(const LinearOrbitProblem& pb) {
  int g = pb.L.dim();
  if (g < 1) fail(errc::invalid_input, "empty matrix");
  if ((int)pb.alpha.size() != g)
    fail(errc::invalid_input, "start point has wrong dimension");
  for (const auto& F : pb.variety)
    if (F.nvars() != g)
      fail(errc::invalid_input, "variety generator has wrong arity");
}

void validate_torus(const TorusOrbitProblem& pb) {
  int g = pb.exponents.dim();
  if (g < 1) fail(errc::invalid_input, "empty exponent matrix");
  if ((int)pb.alpha.size() != g)
    fail(errc::invalid_input, "start point has wrong dimension");
  for (const auto& F : pb.variety)
    if (F.nvars() != g)
      fail(errc::invalid_input, "variety generator has wrong arity");
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const Rat& a = pb.exponents.at(i, j);
      if (a.get_den() != 1)
        fail(errc::invalid_input, "exponent matrix must be integral");
      if (!a.get_num().fits_slong_p() || std::abs(a.get_num().get_si()) > 1000000)
        fail(errc::invalid_input, "exponent matrix entry out of range");
    }
  if (pb.exponents.det() == 0)
    fail(errc::invalid_input, "exponent matrix must be nonsingular");
  for (const auto& a : pb.alpha)
    if (a == 0) fail(errc::invalid_input, "torus point has a zero coordinate");
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

std::vector<Int> collect_denominators(const LinearOrbitProblem& pb) {
  std::vector<Int> dens;
  int g = pb.L.dim();
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) dens.push_back(pb.L.at(i, j).get_den());
  for (const auto& a : pb.alpha) dens.push_back(a.get_den());
  for (const auto& F : pb.variety)
    for (const auto& [e, c] : F.terms()) dens.push_back(c.get_den());
  return dens;
}

uint64_t next_prime_above(uint64_t n) {
  uint64_t q = n + 1;
  if (q <= 2) return 2;
  if (q % 2 == 0) ++q;
  while (!is_prime_u64(q)) q += 2;
  return q;
}

// ---------------------------------------------------------------------------
// Exact linear orbit oracle (binary powering, bit-growth guarded)

struct LinearExact {
  const LinearOrbitProblem& pb;
  long base_bits;

  explicit LinearExact(const LinearOrbitProblem& problem) : pb(problem) {
    base_bits = 1;
    int g = pb.L.dim();
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) base_bits = std::max(base_bits, rat_bits(pb.L.at(i, j)));
    for (const auto& a : pb.alpha) base_bits = std::max(base_bits, rat_bits(a));
  }

  static long rat_bits(const Rat& x) {
    return (long)std::max(mpz_sizeinbase(x.get_num().get_mpz_t(), 2),
                          mpz_sizeinbase(x.get_den().get_mpz_t(), 2));
  }

  std::vector<Rat> point(long n) const {
    if (n < 0) fail(errc::invalid_input, "negative orbit index");
    if ((n + 2) * (base_bits + 2) > kIterBitCap)
      fail(errc::bit_growth_exceeded,
           "orbit index " + std::to_string(n) + " exceeds the exact-arithmetic guard");
    return pb.L.pow((unsigned long)n).apply(pb.alpha);
  }

  bool f_vanishes(long n, const MultiPolyQ& F) const {
    return F.evaluate(point(n)) == 0;
  }

  bool member(long n) const {
    std::vector<Rat> x = point(n);
    for (const auto& F : pb.variety)
      if (F.evaluate(x) != 0) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Exact torus orbit oracle: values live on a fixed coprime factor basis, so
// vanishing tests stay exact without expanding astronomically large powers.

void coprime_insert(std::vector<Int>& basis, Int v) {
  if (v <= 1) return;
  for (size_t i = 0; i < basis.size(); ++i) {
    Int g = gcd(v, basis[i]);
    if (g == 1) continue;
    Int b = basis[i];
    basis.erase(basis.begin() + (long)i);
    coprime_insert(basis, g);
    coprime_insert(basis, b / g);
    coprime_insert(basis, v / g);
    return;
  }
  basis.push_back(v);
}

struct TorusExact {
  int g;
  std::vector<std::vector<long>> A;     // exponent matrix, small integers
  const std::vector<MultiPolyQ>& variety;
  std::vector<Int> basis;               // pairwise coprime, each > 1
  std::vector<int> sigma;               // sign of alpha_j
  std::vector<std::vector<Int>> e0;     // alpha_j = sigma_j * prod basis^e0[j]
  std::vector<uint64_t> witnesses;      // deterministic 62-bit primes
  long abits = 1;
  mutable bool residue_only_used = false;

  explicit TorusExact(const TorusOrbitProblem& pb) : variety(pb.variety) {
    g = pb.exponents.dim();
    A.assign((size_t)g, std::vector<long>((size_t)g, 0));
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) {
        A[(size_t)i][(size_t)j] = pb.exponents.at(i, j).get_num().get_si();
        abits = std::max(abits, (long)mpz_sizeinbase(pb.exponents.at(i, j).get_num().get_mpz_t(), 2));
      }
    for (const auto& a : pb.alpha) {
      Int num = abs(a.get_num());
      coprime_insert(basis, num);
      coprime_insert(basis, Int(a.get_den()));
    }
    std::sort(basis.begin(), basis.end());
    for (const auto& a : pb.alpha) {
      sigma.push_back(a < 0 ? -1 : 1);
      std::vector<Int> e;
      Int num = abs(a.get_num());
      Int den = a.get_den();
      Int rn(1), rd(1);
      for (const auto& q : basis) {
        long en = num == 1 ? 0 : int_valuation_or_zero(num, q);
        long ed = den == 1 ? 0 : int_valuation_or_zero(den, q);
        e.push_back(Int(en - ed));
        rn *= pow_ui(q, (unsigned long)en);
        rd *= pow_ui(q, (unsigned long)ed);
      }
      if (rn != num || rd != den)
        fail(errc::internal, "coprime basis does not span the start point");
      e0.push_back(std::move(e));
    }
    uint64_t w = (1ull << 62);
    while (witnesses.size() < 4) {
      w = next_prime_above(w);
      witnesses.push_back(w);
    }
  }

  static long int_valuation_or_zero(const Int& n, const Int& q) {
    if (n % q != 0) return 0;
    return int_valuation(n, q);
  }

  struct State {
    std::vector<std::vector<Int>> E;  // E[i][t]: exponent of basis[t] in x_i
    std::vector<int> sign;            // sign of x_i
  };

  std::vector<std::vector<Int>> matrix_power(long n) const {
    if ((n + 2) * (abits + 2 + g) > kIterBitCap)
      fail(errc::bit_growth_exceeded,
           "orbit index " + std::to_string(n) + " exceeds the exponent-size guard");
    auto mul = [&](const std::vector<std::vector<Int>>& x,
                   const std::vector<std::vector<Int>>& y) {
      std::vector<std::vector<Int>> r((size_t)g, std::vector<Int>((size_t)g, Int(0)));
      for (int i = 0; i < g; ++i)
        for (int k = 0; k < g; ++k) {
          if (x[(size_t)i][(size_t)k] == 0) continue;
          for (int j = 0; j < g; ++j)
            r[(size_t)i][(size_t)j] += x[(size_t)i][(size_t)k] * y[(size_t)k][(size_t)j];
        }
      return r;
    };
    std::vector<std::vector<Int>> base((size_t)g, std::vector<Int>((size_t)g, Int(0)));
    for (int i = 0; i < g; ++i)
      for (int j = 0; j < g; ++j) base[(size_t)i][(size_t)j] = Int(A[(size_t)i][(size_t)j]);
    std::vector<std::vector<Int>> r((size_t)g, std::vector<Int>((size_t)g, Int(0)));
    for (int i = 0; i < g; ++i) r[(size_t)i][(size_t)i] = 1;
    unsigned long e = (unsigned long)n;
    while (e) {
      if (e & 1ul) r = mul(r, base);
      e >>= 1;
      if (e) base = mul(base, base);
    }
    return r;
  }

  State state(long n) const {
    std::vector<std::vector<Int>> M = matrix_power(n);
    State st;
    st.E.assign((size_t)g, std::vector<Int>(basis.size(), Int(0)));
    st.sign.assign((size_t)g, 1);
    for (int i = 0; i < g; ++i) {
      int par = 0;
      for (int j = 0; j < g; ++j) {
        const Int& m = M[(size_t)i][(size_t)j];
        if (sigma[(size_t)j] < 0 && mpz_odd_p(m.get_mpz_t())) par ^= 1;
        if (m == 0) continue;
        for (size_t t = 0; t < basis.size(); ++t)
          st.E[(size_t)i][t] += m * e0[(size_t)j][t];
      }
      st.sign[(size_t)i] = par ? -1 : 1;
    }
    return st;
  }

  enum class Ans { no, yes_exact, yes_residue };

  Ans f_zero(const State& st, const MultiPolyQ& F) const {
    if (F.is_zero()) return Ans::yes_exact;
    struct Term {
      Rat c;              // signed rational coefficient
      std::vector<Int> e; // basis exponents (can be negative)
    };
    std::vector<Term> terms;
    Int total_bits(0);
    Int max_term_bits(0);
    for (const auto& [m, c] : F.terms()) {
      Term t;
      t.c = c;
      t.e.assign(basis.size(), Int(0));
      int par = 0;
      for (int i = 0; i < g; ++i) {
        if (m[(size_t)i] == 0) continue;
        if (st.sign[(size_t)i] < 0 && (m[(size_t)i] & 1)) par ^= 1;
        for (size_t tt = 0; tt < basis.size(); ++tt)
          t.e[tt] += Int(m[(size_t)i]) * st.E[(size_t)i][tt];
      }
      if (par) t.c = -t.c;
      Int bits(0);
      for (size_t tt = 0; tt < basis.size(); ++tt)
        bits += abs(t.e[tt]) * (unsigned long)mpz_sizeinbase(basis[tt].get_mpz_t(), 2);
      max_term_bits = std::max(max_term_bits, bits);
      terms.push_back(std::move(t));
    }
    (void)total_bits;
    if (max_term_bits <= kExpandBitCap) {
      Rat sum(0);
      for (const auto& t : terms) {
        Int num = t.c.get_num();
        Int den = t.c.get_den();
        for (size_t tt = 0; tt < basis.size(); ++tt) {
          const Int& e = t.e[tt];
          if (e > 0)
            num *= pow_ui(basis[tt], e.get_ui());
          else if (e < 0)
            den *= pow_ui(basis[tt], Int(-e).get_ui());
        }
        Rat term(num);
        term /= Rat(den);
        sum += term;
      }
      return sum == 0 ? Ans::yes_exact : Ans::no;
    }
    // Modular witnesses: a nonzero value mod Q certifies nonvanishing.
    int usable = 0;
    for (uint64_t Q : witnesses) {
      bool ok = true;
      for (const auto& q : basis)
        if (positive_mod_u64(q, Q) == 0) ok = false;
      for (const auto& t : terms)
        if (positive_mod_u64(t.c.get_den(), Q) == 0) ok = false;
      if (!ok) continue;
      ++usable;
      uint64_t sum = 0;
      for (const auto& t : terms) {
        uint64_t v = mulmod_u64(positive_mod_u64(abs(t.c.get_num()), Q),
                                inverse_u64(positive_mod_u64(t.c.get_den(), Q), Q), Q);
        for (size_t tt = 0; tt < basis.size(); ++tt) {
          const Int& e = t.e[tt];
          if (e == 0) continue;
          uint64_t exp_red = positive_mod_u64(positive_mod(e, Int(Q - 1)), Q - 1);
          uint64_t b = positive_mod_u64(basis[tt], Q);
          v = mulmod_u64(v, powmod_u64(b, exp_red, Q), Q);
        }
        if (t.c < 0) v = v ? Q - v : 0;
        sum = (sum + v) % Q;
      }
      if (sum != 0) return Ans::no;
    }
    if (usable == 0)
      fail(errc::bit_growth_exceeded, "no usable modular witness for torus value");
    return Ans::yes_residue;
  }

  bool f_vanishes(long n, const MultiPolyQ& F) const {
    Ans a = f_zero(state(n), F);
    if (a == Ans::yes_residue) residue_only_used = true;
    return a != Ans::no;
  }

  bool member(long n) const {
    State st = state(n);
    bool residue = false;
    for (const auto& F : variety) {
      Ans a = f_zero(st, F);
      if (a == Ans::no) return false;
      if (a == Ans::yes_residue) residue = true;
    }
    if (residue) residue_only_used = true;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Shared residue-class classification

struct ClassOutcome {
  bool full = false;            // the whole class is in the return set
  std::vector<long> members;    // confirmed exceptional indices (absolute n)
};

// Classifies one residue class given its membership series (one per
// generator).  `f_check(k, i)` is the exact vanishing test of generator i at
// class offset k; `full_check(k)` the exact full-variety membership.
// Returns nullopt when the working precision cannot decide the class.
std::optional<ClassOutcome> classify_class(
    const std::vector<PadicSeries>& thetas, long j, long D, long n_max,
    const std::function<bool(long, size_t)>& f_check,
    const std::function<bool(long)>& full_check) {
  std::vector<size_t> nz;
  for (size_t i = 0; i < thetas.size(); ++i)
    if (!thetas[i].zero_to_precision()) nz.push_back(i);
  ClassOutcome out;
  if (nz.empty()) {
    for (size_t i = 0; i < thetas.size(); ++i) {
      auto dec = decide_identically_zero(
          thetas[i], [&](long k) { return f_check(k, i); });
      if (!dec || !dec->identically_zero) return std::nullopt;
    }
    out.full = true;
    return out;
  }
  const PadicSeries& th = thetas[nz[0]];
  size_t fi = nz[0];
  long bound = std::max<long>(1, ceil_div(n_max - j, D));
  auto scan = integer_zeros(th, bound, [&](long w) { return f_check(w, fi); });
  if (!scan) return std::nullopt;
  for (long w : scan->zeros) {
    long n = j + D * w;
    if (full_check(n)) out.members.push_back(n);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rational linear algebra for the singular reduction

// Columns of M that are linearly independent, in order.
std::vector<std::vector<Rat>> independent_columns(const QMatrix& M) {
  int n = M.dim();
  std::vector<std::vector<Rat>> rows;  // echelon rows of selected columns^T
  std::vector<std::vector<Rat>> cols;
  for (int c = 0; c < n; ++c) {
    std::vector<Rat> v((size_t)n);
    for (int i = 0; i < n; ++i) v[(size_t)i] = M.at(i, c);
    // Reduce v against current echelon rows.
    std::vector<Rat> w = v;
    for (const auto& r : rows) {
      int piv = -1;
      for (int i = 0; i < n; ++i)
        if (r[(size_t)i] != 0) { piv = i; break; }
      if (piv >= 0 && w[(size_t)piv] != 0) {
        Rat f = w[(size_t)piv] / r[(size_t)piv];
        for (int i = 0; i < n; ++i) w[(size_t)i] -= f * r[(size_t)i];
      }
    }
    bool zero = std::all_of(w.begin(), w.end(), [](const Rat& x) { return x == 0; });
    if (!zero) {
      rows.push_back(w);
      cols.push_back(v);
    }
  }
  return cols;
}

// Exact solution of W x = b for W with full column rank (columns given);
// fails internally if inconsistent.
std::vector<Rat> solve_columns(const std::vector<std::vector<Rat>>& W,
                               const std::vector<Rat>& b) {
  size_t rows = b.size(), cols = W.size();
  std::vector<std::vector<Rat>> m(rows, std::vector<Rat>(cols + 1));
  for (size_t i = 0; i < rows; ++i) {
    for (size_t j = 0; j < cols; ++j) m[i][j] = W[j][i];
    m[i][cols] = b[i];
  }
  size_t r = 0;
  std::vector<long> pivot_col;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) fail(errc::internal, "column basis not full rank");
    std::swap(m[piv], m[r]);
    Rat inv = Rat(1) / m[r][c];
    for (size_t j = 0; j <= cols; ++j) m[r][j] *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rat f = m[i][c];
      for (size_t j = 0; j <= cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivot_col.push_back((long)c);
    ++r;
  }
  // Consistency: rows beyond rank must be zero.
  for (size_t i = r; i < rows; ++i)
    if (m[i][cols] != 0) fail(errc::internal, "inconsistent image coordinates");
  std::vector<Rat> x(cols, Rat(0));
  for (size_t k = 0; k < pivot_col.size(); ++k) x[(size_t)pivot_col[k]] = m[k][cols];
  return x;
}

ReturnSetDecomposition solve_singular(const LinearOrbitProblem& pb,
                                      const SolveOptions& opt);

// ---------------------------------------------------------------------------
// Linear solver

std::optional<ReturnSetDecomposition> attempt_linear(
    const LinearOrbitProblem& pb, const PrimeSelection& sel,
    const SolveOptions& opt, int prec, int degree, const LinearExact& exact) {
  const Prime& p = sel.p;
  long D = 2 * (long)p.value() * sel.d;
  AnalyticMatrixPower ap = analytic_power(sel.jordan, sel.d, degree, prec);
  const PadicMatrix& B = *sel.jordan.basis;
  const PadicMatrix& Binv = *sel.jordan.basis_inv;
  int g = pb.L.dim();
  std::vector<PadicNumber> alpha_p;
  for (const auto& a : pb.alpha)
    alpha_p.push_back(PadicNumber::embed_rational(a, p, prec));
  std::vector<PadicNumber> beta = Binv.apply(alpha_p);

  std::vector<Progression> progs;
  std::vector<long> exc;
  for (long j = 0; j < D; ++j) {
    SeriesMatrix S = rescaled_power(ap, j, prec);
    std::vector<PadicSeries> xs;
    for (int i = 0; i < g; ++i) {
      PadicSeries xi = PadicSeries::zero(p);
      for (int k = 0; k < g; ++k) {
        PadicSeries yk = PadicSeries::zero(p);
        for (int m = 0; m < g; ++m) yk = yk + S.at(k, m).scaled(beta[(size_t)m]);
        xi = xi + yk.scaled(B.at(i, k));
      }
      xs.push_back(std::move(xi));
    }
    std::vector<PadicSeries> thetas;
    for (const auto& F : pb.variety) thetas.push_back(F.evaluate(xs));
    auto cls = classify_class(
        thetas, j, D, opt.n_max,
        [&](long k, size_t i) { return exact.f_vanishes(j + D * k, pb.variety[i]); },
        [&](long n) { return exact.member(n); });
    if (!cls) return std::nullopt;
    if (cls->full)
      progs.push_back({j, D});
    else
      exc.insert(exc.end(), cls->members.begin(), cls->members.end());
  }
  ReturnSetDecomposition out = canonicalize(std::move(progs), std::move(exc));
  out.certificate = CertificateLevel::rigorous;
  out.prime = p.value();
  out.d = sel.d;
  out.period = D;
  out.burn_in = 0;
  return out;
}

}  // namespace

PrimeSelection select_prime(const LinearOrbitProblem& pb, long p_max, int precision) {
  validate_linear(pb);
  if (pb.L.det() == 0)
    fail(errc::invalid_input, "prime selection requires an invertible map");
  std::vector<Int> dens = collect_denominators(pb);
  std::vector<std::string> rejected;
  auto try_prime = [&](uint64_t pv) -> std::optional<PrimeSelection> {
    for (const auto& den : dens)
      if (mpz_divisible_ui_p(den.get_mpz_t(), (unsigned long)pv)) {
        rejected.push_back(std::to_string(pv) + ": a denominator is divisible by p");
        return std::nullopt;
      }
    Prime p(pv);
    auto res = jordan_decompose(pb.L, p, precision);
    if (std::holds_alternative<JordanFailure>(res)) {
      rejected.push_back(std::to_string(pv) + ": " + std::get<JordanFailure>(res).reason);
      return std::nullopt;
    }
    JordanForm J = std::get<JordanForm>(std::move(res));
    long d = choose_d(J);
    if (2 * (long)pv * d > kMaxClasses) {
      rejected.push_back(std::to_string(pv) + ": residue modulus 2pd = " +
                         std::to_string(2 * (long)pv * d) + " too large");
      return std::nullopt;
    }
    return PrimeSelection{p, std::move(J), d, rejected};
  };
  if (pb.prime_hint) {
    auto r = try_prime(pb.prime_hint->value());
    if (r) return std::move(*r);
    fail(errc::no_prime_found, "hinted prime rejected (" + rejected.back() + ")");
  }
  for (uint64_t pv = 2; (long)pv <= p_max; pv = next_prime_above(pv)) {
    auto r = try_prime(pv);
    if (r) return std::move(*r);
  }
  std::ostringstream os;
  os << "no admissible prime <= " << p_max << " (" << rejected.size()
     << " candidates rejected; first: " << (rejected.empty() ? "none" : rejected.front())
     << "; last: " << (rejected.empty() ? "none" : rejected.back()) << ")";
  fail(errc::no_prime_found, os.str());
}

ReturnSetDecomposition solve_linear(const LinearOrbitProblem& pb,
                                    const SolveOptions& opt) {
  validate_linear(pb);
  if (trivial_variety(pb.variety)) return full_set();
  if (pb.L.det() == 0) return solve_singular(pb, opt);
  LinearExact exact(pb);
  int prec = opt.precision;
  int degree = opt.degree;
  for (int round = 0; round < kPrecisionLadder; ++round) {
    PrimeSelection sel = select_prime(pb, opt.p_max, prec);
    auto r = attempt_linear(pb, sel, opt, prec, degree, exact);
    if (r) return std::move(*r);
    prec *= 2;
    degree += degree / 2;
  }
  fail(errc::precision_exhausted,
       "residue classes undecidable after precision ladder");
}

namespace {

ReturnSetDecomposition solve_singular(const LinearOrbitProblem& pb,
                                      const SolveOptions& opt) {
  int g = pb.L.dim();
  LinearExact exact(pb);
  std::vector<long> small;
  for (long n = 0; n < g; ++n)
    if (exact.member(n)) small.push_back(n);
  QMatrix P = pb.L.pow((unsigned long)g);
  std::vector<std::vector<Rat>> W = independent_columns(P);
  int r = (int)W.size();
  if (r == 0) {
    // L^g = 0: the orbit is constantly zero from index g on.
    std::vector<Rat> zero((size_t)g, Rat(0));
    bool zmember = true;
    for (const auto& F : pb.variety)
      if (F.evaluate(zero) != 0) zmember = false;
    std::vector<Progression> progs;
    if (zmember) progs.push_back({(long)g, 1});
    ReturnSetDecomposition out = canonicalize(std::move(progs), std::move(small));
    out.certificate = CertificateLevel::rigorous;
    out.period = 1;
    out.burn_in = g;
    return out;
  }
  // Induced invertible map on the stable image, in the column basis W.
  QMatrix Lr(r);
  for (int k = 0; k < r; ++k) {
    std::vector<Rat> lw = pb.L.apply(W[(size_t)k]);
    std::vector<Rat> coords = solve_columns(W, lw);
    for (int m = 0; m < r; ++m) Lr.at(m, k) = coords[(size_t)m];
  }
  std::vector<Rat> alpha_r = solve_columns(W, P.apply(pb.alpha));
  std::vector<std::vector<Rat>> subst((size_t)g, std::vector<Rat>((size_t)r));
  for (int i = 0; i < g; ++i)
    for (int k = 0; k < r; ++k) subst[(size_t)i][(size_t)k] = W[(size_t)k][(size_t)i];
  std::vector<MultiPolyQ> vr;
  for (const auto& F : pb.variety) vr.push_back(F.substitute_linear(subst, r));
  LinearOrbitProblem reduced{Lr, std::move(alpha_r), std::move(vr), pb.prime_hint};
  ReturnSetDecomposition sub = solve_linear(reduced, opt);
  std::vector<Progression> progs;
  for (const auto& pr : sub.progressions) progs.push_back({pr.start + g, pr.modulus});
  std::vector<long> exc = std::move(small);
  for (long e : sub.exceptional) exc.push_back(e + g);
  ReturnSetDecomposition out = canonicalize(std::move(progs), std::move(exc));
  out.certificate = sub.certificate;
  out.prime = sub.prime;
  out.d = sub.d;
  out.period = sub.period;
  out.burn_in = g;
  return out;
}

// ---------------------------------------------------------------------------
// Torus solver

// Preperiod and period of the sequence A^n mod m.
std::pair<long, long> power_preperiod_mod(const std::vector<std::vector<long>>& A,
                                          long m, int g) {
  std::map<std::vector<long>, long> seen;
  std::vector<long> x((size_t)g * g, 0);
  for (int i = 0; i < g; ++i) x[(size_t)i * g + i] = 1 % m;
  long n = 0;
  while (true) {
    auto [it, fresh] = seen.emplace(x, n);
    if (!fresh) return {it->second, n - it->second};
    if (++n > kPeriodScanCap)
      fail(errc::no_certificate, "matrix power sequence mod m did not cycle in bound");
    std::vector<long> y((size_t)g * g, 0);
    for (int i = 0; i < g; ++i)
      for (int k = 0; k < g; ++k) {
        long a = ((A[(size_t)i][(size_t)k] % m) + m) % m;
        if (a == 0) continue;
        for (int j = 0; j < g; ++j)
          y[(size_t)i * g + j] = (y[(size_t)i * g + j] + a * x[(size_t)k * g + j]) % m;
      }
    x = std::move(y);
  }
}

PadicNumber unit_pow(const PadicNumber& u, Int e, int prec) {
  const Prime& p = u.prime();
  PadicNumber base = u;
  if (e < 0) {
    base = PadicNumber::one(p, prec) / u;
    e = -e;
  }
  PadicNumber r = PadicNumber::one(p, prec);
  if (e == 0) return r;
  size_t nbits = mpz_sizeinbase(e.get_mpz_t(), 2);
  for (size_t i = nbits; i-- > 0;) {
    r = r * r;
    if (mpz_tstbit(e.get_mpz_t(), i)) r = r * base;
  }
  return r;
}

PadicSeries drop_constant(const PadicSeries& f) {
  std::vector<PadicNumber> c;
  c.push_back(PadicNumber::exact_zero(f.prime()));
  for (int n = 1; n <= f.degree(); ++n) c.push_back(f.coeff(n));
  return PadicSeries(f.prime(), std::move(c), f.tail());
}

std::optional<ReturnSetDecomposition> attempt_torus(
    const TorusOrbitProblem& pb, const PrimeSelection& sel,
    const SolveOptions& opt, int prec, int degree, const TorusExact& exact) {
  const Prime& p = sel.p;
  int g = pb.exponents.dim();
  long m2 = p.value() == 2 ? 2 : (long)p.value() - 1;
  auto [N0, s] = power_preperiod_mod(exact.A, m2, g);
  long D = std::lcm(2 * (long)p.value() * sel.d, s);
  if (D > kMaxClasses)
    fail(errc::no_prime_found,
         "residue modulus " + std::to_string(D) + " too large at p = " +
             std::to_string(p.value()));
  AnalyticMatrixPower ap = analytic_power(sel.jordan, sel.d, degree, prec);
  PadicNumber stride = PadicNumber::embed_rational(Rat(D / sel.d), p, prec);
  SeriesMatrix E = ap.entries.scaled_argument(stride);
  const PadicMatrix& B = *sel.jordan.basis;
  const PadicMatrix& Binv = *sel.jordan.basis_inv;

  // Principal-unit logarithms of the start coordinates.
  std::vector<PadicNumber> ell;
  for (const auto& a : pb.alpha) {
    PadicNumber u = PadicNumber::embed_rational(a, p, prec);
    if (p.value() == 2) {
      long res4 = (long)positive_mod_u64(a.get_num() * a.get_den(), 4);
      if (res4 != 1) u = -u;
    } else {
      uint64_t num = positive_mod_u64(a.get_num(), p.value());
      uint64_t den = positive_mod_u64(a.get_den(), p.value());
      uint64_t res = mulmod_u64(num, inverse_u64(den, p.value()), p.value());
      PadicNumber omega = teichmuller_lift(p, Int((unsigned long)res), prec);
      u = u / omega;
    }
    ell.push_back(log_p(u));
  }
  std::vector<PadicNumber> v0 = Binv.apply(ell);
  // u_i(w) = [B E((D/d) w) B^{-1} ell]_i
  std::vector<PadicSeries> us;
  for (int i = 0; i < g; ++i) {
    PadicSeries ui = PadicSeries::zero(p);
    for (int k = 0; k < g; ++k) {
      PadicSeries tk = PadicSeries::zero(p);
      for (int m = 0; m < g; ++m) tk = tk + E.at(k, m).scaled(v0[(size_t)m]);
      ui = ui + tk.scaled(B.at(i, k));
    }
    us.push_back(std::move(ui));
  }

  std::vector<Progression> progs;
  std::vector<long> exc;
  // Exact p-adic orbit point, advanced coordinatewise.
  std::vector<PadicNumber> xj;
  for (const auto& a : pb.alpha)
    xj.push_back(PadicNumber::embed_rational(a, p, prec));
  std::vector<std::vector<Int>> Mj((size_t)g, std::vector<Int>((size_t)g, Int(0)));
  for (int i = 0; i < g; ++i) Mj[(size_t)i][(size_t)i] = 1;
  auto advance = [&]() {
    std::vector<PadicNumber> nx;
    for (int i = 0; i < g; ++i) {
      PadicNumber v = PadicNumber::one(p, prec);
      for (int k = 0; k < g; ++k)
        v = v * padic_pow(xj[(size_t)k], exact.A[(size_t)i][(size_t)k]);
      nx.push_back(std::move(v));
    }
    xj = std::move(nx);
    std::vector<std::vector<Int>> nm((size_t)g, std::vector<Int>((size_t)g, Int(0)));
    for (int i = 0; i < g; ++i)
      for (int k = 0; k < g; ++k) {
        if (exact.A[(size_t)i][(size_t)k] == 0) continue;
        for (int j2 = 0; j2 < g; ++j2)
          nm[(size_t)i][(size_t)j2] +=
              Int(exact.A[(size_t)i][(size_t)k]) * Mj[(size_t)k][(size_t)j2];
      }
    Mj = std::move(nm);
  };
  for (long n = 0; n < N0; ++n) {
    if (exact.member(n)) exc.push_back(n);
    advance();
  }
  for (long j = N0; j < N0 + D; ++j) {
    // mu_i(w) = [A^j u(w)]_i; x_i(w) = x_i^{(j)} exp(mu_i(w) - mu_i(0)).
    std::vector<PadicSeries> xs;
    for (int i = 0; i < g; ++i) {
      PadicSeries mu = PadicSeries::zero(p);
      for (int k = 0; k < g; ++k) {
        if (Mj[(size_t)i][(size_t)k] == 0) continue;
        PadicNumber c = PadicNumber::embed_rational(Rat(Mj[(size_t)i][(size_t)k]), p, prec);
        mu = mu + us[(size_t)k].scaled(c);
      }
      PadicSeries delta = drop_constant(mu);
      xs.push_back(exp_series(delta, degree).scaled(xj[(size_t)i]));
    }
    std::vector<PadicSeries> thetas;
    for (const auto& F : pb.variety) thetas.push_back(F.evaluate(xs));
    auto cls = classify_class(
        thetas, j, D, opt.n_max,
        [&](long k, size_t i) { return exact.f_vanishes(j + D * k, pb.variety[i]); },
        [&](long n) { return exact.member(n); });
    if (!cls) return std::nullopt;
    if (cls->full)
      progs.push_back({j, D});
    else
      exc.insert(exc.end(), cls->members.begin(), cls->members.end());
    advance();
  }
  ReturnSetDecomposition out = canonicalize(std::move(progs), std::move(exc));
  out.certificate = exact.residue_only_used ? CertificateLevel::heuristic
                                            : CertificateLevel::rigorous;
  out.prime = p.value();
  out.d = sel.d;
  out.period = D;
  out.burn_in = N0;
  return out;
}

}  // namespace

PrimeSelection select_prime(const TorusOrbitProblem& pb, long p_max, int precision) {
  validate_torus(pb);
  std::vector<std::string> rejected;
  auto try_prime = [&](uint64_t pv) -> std::optional<PrimeSelection> {
    for (const auto& a : pb.alpha) {
      if (*rat_valuation(a, Int((unsigned long)pv)) != 0) {
        rejected.push_back(std::to_string(pv) + ": coordinate " + rational_to_string(a) +
                           " is not a p-adic unit");
        return std::nullopt;
      }
    }
    for (const auto& F : pb.variety)
      for (const auto& [e, c] : F.terms())
        if (mpz_divisible_ui_p(c.get_den().get_mpz_t(), (unsigned long)pv)) {
          rejected.push_back(std::to_string(pv) + ": a denominator is divisible by p");
          return std::nullopt;
        }
    Prime p(pv);
    auto res = jordan_decompose(pb.exponents, p, precision);
    if (std::holds_alternative<JordanFailure>(res)) {
      rejected.push_back(std::to_string(pv) + ": " + std::get<JordanFailure>(res).reason);
      return std::nullopt;
    }
    JordanForm J = std::get<JordanForm>(std::move(res));
    long d = choose_d(J);
    if (2 * (long)pv * d > kMaxClasses) {
      rejected.push_back(std::to_string(pv) + ": residue modulus 2pd = " +
                         std::to_string(2 * (long)pv * d) + " too large");
      return std::nullopt;
    }
    return PrimeSelection{p, std::move(J), d, rejected};
  };
  if (pb.prime_hint) {
    auto r = try_prime(pb.prime_hint->value());
    if (r) return std::move(*r);
    fail(errc::no_prime_found, "hinted prime rejected (" + rejected.back() + ")");
  }
  for (uint64_t pv = 2; (long)pv <= p_max; pv = next_prime_above(pv)) {
    auto r = try_prime(pv);
    if (r) return std::move(*r);
  }
  std::ostringstream os;
  os << "no admissible prime <= " << p_max << " (" << rejected.size()
     << " candidates rejected; first: " << (rejected.empty() ? "none" : rejected.front())
     << "; last: " << (rejected.empty() ? "none" : rejected.back()) << ")";
  fail(errc::no_prime_found, os.str());
}

ReturnSetDecomposition solve_torus(const TorusOrbitProblem& pb,
                                   const SolveOptions& opt) {
  validate_torus(pb);
  if (trivial_variety(pb.variety)) return full_set();
  TorusExact exact(pb);
  int prec = opt.precision;
  int degree = opt.degree;
  for (int round = 0; round < kPrecisionLadder; ++round) {
    PrimeSelection sel = select_prime(pb, opt.p_max, prec);
    auto r = attempt_torus(pb, sel, opt, prec, degree, exact);
    if (r) return std::move(*r);
    prec *= 2;
    degree += degree / 2;
  }
  fail(errc::precision_exhausted,
       "residue classes undecidable after precision ladder");
}

std::vector<char> brute_force_membership(const LinearOrbitProblem& pb, long n_max) {
  validate_linear(pb);
  std::vector<char> bits;
  bits.reserve((size_t)std::max<long>(0, n_max));
  std::vector<Rat> x = pb.alpha;
  int g = pb.L.dim();
  for (long n = 0; n < n_max; ++n) {
    for (const auto& c : x)
      if ((long)mpz_sizeinbase(c.get_num().get_mpz_t(), 2) > kIterBitCap)
        fail(errc::bit_growth_exceeded, "orbit entries exceed the bit guard");
    bool in = true;
    for (const auto& F : pb.variety)
      if (F.evaluate(x) != 0) {
        in = false;
        break;
      }
    bits.push_back(in ? 1 : 0);
    std::vector<Rat> nx((size_t)g, Rat(0));
    for (int i = 0; i < g; ++i)
      for (int k = 0; k < g; ++k)
        if (pb.L.at(i, k) != 0) nx[(size_t)i] += pb.L.at(i, k) * x[(size_t)k];
    x = std::move(nx);
  }
  return bits;
}

std::vector<char> brute_force_membership(const TorusOrbitProblem& pb, long n_max) {
  validate_torus(pb);
  TorusExact exact(pb);
  std::vector<char> bits;
  bits.reserve((size_t)std::max<long>(0, n_max));
  for (long n = 0; n < n_max; ++n) bits.push_back(exact.member(n) ? 1 : 0);
  return bits;
}

}  // namespace padicdyn
