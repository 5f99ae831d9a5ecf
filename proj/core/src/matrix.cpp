#include "padicdyn/matrix.hpp"

#include <algorithm>
#include <sstream>

#include "padicdyn/errors.hpp"

namespace padicdyn {

QMatrix::QMatrix(int n, std::vector<Rat> entries) : n_(n), a_(std::move(entries)) {
  if ((int)a_.size() != n * n) fail(errc::internal, "matrix entry count mismatch");
  for (auto& x : a_) x.canonicalize();
}

QMatrix QMatrix::identity(int n) {
  QMatrix m(n);
  for (int i = 0; i < n; ++i) m.at(i, i) = Rat(1);
  return m;
}

QMatrix operator+(const QMatrix& a, const QMatrix& b) {
  QMatrix r(a.n_);
  for (size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] + b.a_[i];
  return r;
}

QMatrix operator-(const QMatrix& a, const QMatrix& b) {
  QMatrix r(a.n_);
  for (size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] - b.a_[i];
  return r;
}

QMatrix operator*(const QMatrix& a, const QMatrix& b) {
  int n = a.n_;
  QMatrix r(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (a.at(i, k) == 0) continue;
      for (int j = 0; j < n; ++j) r.at(i, j) += a.at(i, k) * b.at(k, j);
    }
  return r;
}

std::vector<Rat> QMatrix::apply(const std::vector<Rat>& v) const {
  std::vector<Rat> r((size_t)n_, Rat(0));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (at(i, j) != 0) r[(size_t)i] += at(i, j) * v[(size_t)j];
  return r;
}

QMatrix QMatrix::scaled(const Rat& s) const {
  QMatrix r(n_);
  for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * s;
  return r;
}

QMatrix QMatrix::pow(unsigned long e) const {
  QMatrix r = identity(n_), b = *this;
  while (e) {
    if (e & 1ul) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

namespace {

// Row-reduce in place; returns (rank, pivot columns, det of the square part).
struct Echelon {
  int rank;
  std::vector<int> pivot_col;
  Rat det;
};

Echelon reduce(std::vector<std::vector<Rat>>& m) {
  int rows = (int)m.size();
  int cols = rows ? (int)m[0].size() : 0;
  Echelon e{0, {}, Rat(1)};
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (m[(size_t)i][(size_t)c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != r) {
      std::swap(m[(size_t)piv], m[(size_t)r]);
      e.det = -e.det;
    }
    e.det *= m[(size_t)r][(size_t)c];
    Rat inv = Rat(1) / m[(size_t)r][(size_t)c];
    for (int j = c; j < cols; ++j) m[(size_t)r][(size_t)j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[(size_t)i][(size_t)c] == 0) continue;
      Rat f = m[(size_t)i][(size_t)c];
      for (int j = c; j < cols; ++j) m[(size_t)i][(size_t)j] -= f * m[(size_t)r][(size_t)j];
    }
    e.pivot_col.push_back(c);
    ++r;
  }
  e.rank = r;
  return e;
}

} // namespace

Rat QMatrix::det() const {
  std::vector<std::vector<Rat>> m((size_t)n_, std::vector<Rat>((size_t)n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m[(size_t)i][(size_t)j] = at(i, j);
  Echelon e = reduce(m);
  return e.rank == n_ ? e.det : Rat(0);
}

std::optional<QMatrix> QMatrix::inverse() const {
  std::vector<std::vector<Rat>> m((size_t)n_, std::vector<Rat>((size_t)2 * n_));
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) m[(size_t)i][(size_t)j] = at(i, j);
    m[(size_t)i][(size_t)(n_ + i)] = Rat(1);
  }
  Echelon e = reduce(m);
  if (e.rank < n_ || e.pivot_col[(size_t)n_ - 1] >= n_) return std::nullopt;
  QMatrix r(n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r.at(i, j) = m[(size_t)i][(size_t)(n_ + j)];
  return r;
}

int QMatrix::rank() const {
  std::vector<std::vector<Rat>> m((size_t)n_, std::vector<Rat>((size_t)n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m[(size_t)i][(size_t)j] = at(i, j);
  return reduce(m).rank;
}

std::vector<std::vector<Rat>> QMatrix::kernel() const {
  std::vector<std::vector<Rat>> m((size_t)n_, std::vector<Rat>((size_t)n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m[(size_t)i][(size_t)j] = at(i, j);
  Echelon e = reduce(m);
  std::vector<bool> is_pivot((size_t)n_, false);
  for (int c : e.pivot_col) is_pivot[(size_t)c] = true;
  std::vector<std::vector<Rat>> basis;
  for (int fc = 0; fc < n_; ++fc) {
    if (is_pivot[(size_t)fc]) continue;
    std::vector<Rat> v((size_t)n_, Rat(0));
    v[(size_t)fc] = Rat(1);
    for (int r = 0; r < e.rank; ++r)
      v[(size_t)e.pivot_col[(size_t)r]] = -m[(size_t)r][(size_t)fc];
    basis.push_back(std::move(v));
  }
  return basis;
}

UniPolyQ QMatrix::charpoly() const {
  // Faddeev-LeVerrier: exact over Q.
  std::vector<Rat> c((size_t)n_ + 1, Rat(0));
  c[(size_t)n_] = Rat(1);
  QMatrix M = *this;
  for (int k = 1; k <= n_; ++k) {
    Rat tr(0);
    for (int i = 0; i < n_; ++i) tr += M.at(i, i);
    Rat ck = -tr / Rat(k);
    c[(size_t)(n_ - k)] = ck;
    if (k < n_) {
      QMatrix T = M;
      for (int i = 0; i < n_; ++i) T.at(i, i) += ck;
      M = (*this) * T;
    }
  }
  return UniPolyQ(std::move(c));
}

std::string QMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < n_; ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < n_; ++j) os << (j ? ", " : "") << rational_to_string(at(i, j));
    os << "]";
  }
  os << "]";
  return os.str();
}

PadicMatrix::PadicMatrix(const Prime& p, int n)
    : p_(p), n_(n), a_((size_t)n * n, PadicNumber::exact_zero(p)) {}

PadicMatrix PadicMatrix::identity(const Prime& p, int n, int prec) {
  PadicMatrix m(p, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = PadicNumber::one(p, prec);
  return m;
}

PadicMatrix PadicMatrix::embed(const QMatrix& m, const Prime& p, int prec) {
  PadicMatrix r(p, m.dim());
  for (int i = 0; i < m.dim(); ++i)
    for (int j = 0; j < m.dim(); ++j)
      if (m.at(i, j) != 0) r.at(i, j) = PadicNumber::embed_rational(m.at(i, j), p, prec);
  return r;
}

PadicMatrix operator+(const PadicMatrix& a, const PadicMatrix& b) {
  PadicMatrix r(a.p_, a.n_);
  for (size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] + b.a_[i];
  return r;
}

PadicMatrix operator-(const PadicMatrix& a, const PadicMatrix& b) {
  PadicMatrix r(a.p_, a.n_);
  for (size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] - b.a_[i];
  return r;
}

PadicMatrix operator*(const PadicMatrix& a, const PadicMatrix& b) {
  int n = a.n_;
  PadicMatrix r(a.p_, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (a.at(i, k).is_exact_zero()) continue;
      for (int j = 0; j < n; ++j)
        r.at(i, j) = r.at(i, j) + a.at(i, k) * b.at(k, j);
    }
  return r;
}

std::vector<PadicNumber> PadicMatrix::apply(const std::vector<PadicNumber>& v) const {
  std::vector<PadicNumber> r((size_t)n_, PadicNumber::exact_zero(p_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      r[(size_t)i] = r[(size_t)i] + at(i, j) * v[(size_t)j];
  return r;
}

PadicMatrix PadicMatrix::pow(unsigned long e) const {
  PadicMatrix r = identity(p_, n_), b = *this;
  while (e) {
    if (e & 1ul) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

namespace {

// Valuation used for pivot choice: exact zeros are +inf, inexact zeros rank
// by their bound (never chosen over a unit of smaller valuation).
long pivot_val(const PadicNumber& x) {
  if (x.is_exact_zero()) return kAbsPrecInf;
  if (x.is_inexact_zero()) return x.valuation_lower_bound();
  return x.valuation();
}

} // namespace

PadicNumber PadicMatrix::det() const {
  std::vector<std::vector<PadicNumber>> m((size_t)n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m[(size_t)i].push_back(at(i, j));
  PadicNumber d = PadicNumber::one(p_, kDefaultPrecision);
  for (int c = 0; c < n_; ++c) {
    int piv = -1;
    long best = kAbsPrecInf;
    for (int i = c; i < n_; ++i) {
      long v = pivot_val(m[(size_t)i][(size_t)c]);
      if (v < best) {
        best = v;
        piv = i;
      }
    }
    if (piv < 0 || m[(size_t)piv][(size_t)c].is_zero_like()) {
      // Singular to precision: determinant only bounded.
      return PadicNumber::inexact_zero(p_, best == kAbsPrecInf ? kAbsPrecInf / 4 : best);
    }
    if (piv != c) {
      std::swap(m[(size_t)piv], m[(size_t)c]);
      d = -d;
    }
    d = d * m[(size_t)c][(size_t)c];
    for (int i = c + 1; i < n_; ++i) {
      if (m[(size_t)i][(size_t)c].is_exact_zero()) continue;
      PadicNumber f = m[(size_t)i][(size_t)c] / m[(size_t)c][(size_t)c];
      for (int j = c; j < n_; ++j)
        m[(size_t)i][(size_t)j] = m[(size_t)i][(size_t)j] - f * m[(size_t)c][(size_t)j];
    }
  }
  return d;
}

PadicMatrix PadicMatrix::inverse() const {
  std::vector<std::vector<PadicNumber>> m((size_t)n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) m[(size_t)i].push_back(at(i, j));
    for (int j = 0; j < n_; ++j)
      m[(size_t)i].push_back(i == j ? PadicNumber::one(p_, kDefaultPrecision)
                                    : PadicNumber::exact_zero(p_));
  }
  for (int c = 0; c < n_; ++c) {
    int piv = -1;
    long best = kAbsPrecInf;
    for (int i = c; i < n_; ++i) {
      long v = pivot_val(m[(size_t)i][(size_t)c]);
      if (v < best) {
        best = v;
        piv = i;
      }
    }
    if (piv < 0 || m[(size_t)piv][(size_t)c].is_zero_like())
      fail(errc::not_a_unit, "matrix not invertible at working precision");
    std::swap(m[(size_t)piv], m[(size_t)c]);
    PadicNumber inv = PadicNumber::one(p_, kDefaultPrecision) / m[(size_t)c][(size_t)c];
    for (int j = 0; j < 2 * n_; ++j) m[(size_t)c][(size_t)j] = m[(size_t)c][(size_t)j] * inv;
    for (int i = 0; i < n_; ++i) {
      if (i == c || m[(size_t)i][(size_t)c].is_exact_zero()) continue;
      PadicNumber f = m[(size_t)i][(size_t)c];
      for (int j = 0; j < 2 * n_; ++j)
        m[(size_t)i][(size_t)j] = m[(size_t)i][(size_t)j] - f * m[(size_t)c][(size_t)j];
    }
  }
  PadicMatrix r(p_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) r.at(i, j) = m[(size_t)i][(size_t)(n_ + j)];
  return r;
}

bool PadicMatrix::is_integral() const {
  for (const auto& x : a_) {
    if (x.is_exact_zero()) continue;
    if (x.is_inexact_zero()) {
      if (x.valuation_lower_bound() < 0) return false;
    } else if (x.valuation() < 0) {
      return false;
    }
  }
  return true;
}

bool PadicMatrix::equals_to_precision(const PadicMatrix& other, long min_abs_prec) const {
  if (n_ != other.n_) return false;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) {
      PadicNumber d = at(i, j) - other.at(i, j);
      if (!d.is_zero_like()) return false;
      if (d.valuation_lower_bound() < min_abs_prec) return false;
    }
  return true;
}

std::string PadicMatrix::to_string() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < n_; ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < n_; ++j) os << (j ? ", " : "") << at(i, j).to_string();
    os << "]";
  }
  os << "]";
  return os.str();
}

PadicMatrix jordan_matrix(const Prime& p, const JordanForm& J, int prec) {
  PadicMatrix m(p, J.dim());
  int off = 0;
  for (const auto& b : J.blocks) {
    for (int i = 0; i < b.size; ++i) {
      m.at(off + i, off + i) = b.lambda.with_relative_precision(prec);
      if (i + 1 < b.size) m.at(off + i, off + i + 1) = PadicNumber::one(p, prec);
    }
    off += b.size;
  }
  return m;
}

namespace {

// Hensel lift of a simple root of an integer polynomial: r0 with
// F(r0) = 0 mod p and F'(r0) a unit mod p, lifted to p^prec.
Int hensel_lift_root(const std::vector<Int>& F, uint64_t r0, const Prime& p, int prec) {
  auto eval_mod = [&](const Int& x, const Int& mod) {
    Int r(0);
    for (size_t i = F.size(); i-- > 0;) r = (r * x + F[i]) % mod;
    return r;
  };
  auto deriv_mod = [&](const Int& x, const Int& mod) {
    Int r(0);
    for (size_t i = F.size(); i-- > 1;) r = (r * x + Int((unsigned long)i) * F[i]) % mod;
    return r;
  };
  Int x((unsigned long)r0);
  long k = 1;
  while (k < prec) {
    long k2 = std::min<long>(2 * k, prec);
    Int mod = prime_power(p.value(), (unsigned long)k2);
    Int fx = positive_mod(eval_mod(x, mod), mod);
    Int dfx = positive_mod(deriv_mod(x, mod), mod);
    x = positive_mod(x - fx * mod_inverse(dfx, mod), mod);
    k = k2;
  }
  return x;
}

// Kernel vector of a PadicMatrix known to have a one-dimensional kernel at
// working precision; normalized so its minimal valuation is zero.
std::vector<PadicNumber> kernel_vector(const PadicMatrix& M) {
  const Prime& p = M.prime();
  int n = M.dim();
  std::vector<std::vector<PadicNumber>> m((size_t)n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[(size_t)i].push_back(M.at(i, j));
  std::vector<int> pivot_of_col((size_t)n, -1);
  int r = 0;
  for (int c = 0; c < n && r < n; ++c) {
    int piv = -1;
    long best = kAbsPrecInf;
    for (int i = r; i < n; ++i) {
      long v = pivot_val(m[(size_t)i][(size_t)c]);
      if (v < best) {
        best = v;
        piv = i;
      }
    }
    if (piv < 0 || m[(size_t)piv][(size_t)c].is_zero_like()) continue; // free column
    std::swap(m[(size_t)piv], m[(size_t)r]);
    PadicNumber inv = PadicNumber::one(p, kDefaultPrecision) / m[(size_t)r][(size_t)c];
    for (int j = 0; j < n; ++j) m[(size_t)r][(size_t)j] = m[(size_t)r][(size_t)j] * inv;
    for (int i = 0; i < n; ++i) {
      if (i == r || m[(size_t)i][(size_t)c].is_exact_zero()) continue;
      PadicNumber f = m[(size_t)i][(size_t)c];
      for (int j = 0; j < n; ++j)
        m[(size_t)i][(size_t)j] = m[(size_t)i][(size_t)j] - f * m[(size_t)r][(size_t)j];
    }
    pivot_of_col[(size_t)c] = r;
    ++r;
  }
  int free_col = -1;
  for (int c = 0; c < n; ++c)
    if (pivot_of_col[(size_t)c] < 0) free_col = c;
  if (free_col < 0) fail(errc::internal, "expected a kernel vector");
  std::vector<PadicNumber> v((size_t)n, PadicNumber::exact_zero(p));
  v[(size_t)free_col] = PadicNumber::one(p, kDefaultPrecision);
  for (int c = 0; c < n; ++c) {
    int pr = pivot_of_col[(size_t)c];
    if (pr >= 0) v[(size_t)c] = -m[(size_t)pr][(size_t)free_col];
  }
  long minval = kAbsPrecInf;
  for (const auto& x : v)
    if (!x.is_zero_like()) minval = std::min(minval, x.valuation());
  if (minval == kAbsPrecInf) fail(errc::internal, "kernel vector vanished");
  if (minval != 0) {
    PadicNumber scale = PadicNumber::embed_rational(Rat(1), M.prime(), kDefaultPrecision);
    scale = scale / PadicNumber::from_unit(M.prime(), minval, Int(1), kDefaultPrecision);
    for (auto& x : v) x = x * scale;
  }
  return v;
}

// Jordan chains over Q for a rational eigenvalue of multiplicity m; returns
// columns (each chain ordered N^{k-1}w, ..., Nw, w) and the chain sizes.
struct RationalChains {
  std::vector<std::vector<Rat>> columns;
  std::vector<int> sizes;
};

RationalChains rational_jordan_chains(const QMatrix& L, const Rat& lambda, int mult) {
  int n = L.dim();
  QMatrix N = L - QMatrix::identity(n).scaled(lambda);
  // Kernels of N^k for k = 1..mult.
  std::vector<std::vector<std::vector<Rat>>> ker((size_t)mult + 1);
  QMatrix Nk = QMatrix::identity(n);
  for (int k = 1; k <= mult; ++k) {
    Nk = Nk * N;
    ker[(size_t)k] = Nk.kernel();
  }
  auto in_span = [&](const std::vector<std::vector<Rat>>& span, const std::vector<Rat>& v) {
    if (span.empty()) return std::all_of(v.begin(), v.end(), [](const Rat& x) { return x == 0; });
    std::vector<std::vector<Rat>> m;
    for (const auto& s : span) m.push_back(s);
    m.push_back(v);
    // v in span iff adding it does not raise the rank.
    std::vector<std::vector<Rat>> m1 = m;
    Echelon e1 = reduce(m1);
    std::vector<std::vector<Rat>> m2(m.begin(), m.end() - 1);
    Echelon e2 = reduce(m2);
    return e1.rank == e2.rank;
  };
  RationalChains out;
  std::vector<std::vector<Rat>> used; // all chain members found so far
  int height = mult;
  while (height >= 1) {
    const auto& Kh = ker[(size_t)height];
    const auto& Kl = height > 1 ? ker[(size_t)height - 1] : std::vector<std::vector<Rat>>{};
    for (const auto& cand : Kh) {
      std::vector<std::vector<Rat>> span = Kl;
      for (const auto& u : used) span.push_back(u);
      if (in_span(span, cand)) continue;
      // New chain of this height.
      std::vector<std::vector<Rat>> chain{cand};
      for (int k = 1; k < height; ++k) chain.push_back(N.apply(chain.back()));
      // Normalize the whole chain by one rational scale: make entries
      // integral with content 1 across the chain.
      Int den(1);
      for (const auto& vv : chain)
        for (const auto& x : vv) den = lcm(den, x.get_den());
      Int content(0);
      for (auto& vv : chain)
        for (auto& x : vv) {
          x *= Rat(den);
          x.canonicalize();
          content = gcd(content, x.get_num());
        }
      if (content > 1)
        for (auto& vv : chain)
          for (auto& x : vv) {
            x /= Rat(content);
            x.canonicalize();
          }
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        out.columns.push_back(*it);
        used.push_back(*it);
      }
      out.sizes.push_back(height);
    }
    --height;
  }
  return out;
}

} // namespace

std::variant<JordanForm, JordanFailure> jordan_decompose(const QMatrix& L, const Prime& p,
                                                         int prec) {
  int n = L.dim();
  UniPolyQ cp = L.charpoly();
  // Rational eigenvalues, with multiplicities.
  std::vector<std::pair<Rat, int>> rational = cp.rational_roots();
  UniPolyQ rem = cp;
  for (const auto& [r, m] : rational) {
    UniPolyQ lin({-r, Rat(1)});
    for (int k = 0; k < m; ++k) rem = UniPolyQ::divmod(rem, lin).first;
  }
  for (const auto& [r, m] : rational) {
    if (r == 0) return JordanFailure{"zero eigenvalue"};
    if (*rat_valuation(r, Int((unsigned long)p.value())) != 0)
      return JordanFailure{"rational eigenvalue " + rational_to_string(r) + " is not a p-adic unit"};
  }
  // Remaining factor must split mod p with simple nonzero roots.
  std::vector<uint64_t> lifted_res;
  if (rem.degree() > 0) {
    std::vector<uint64_t> rp;
    try {
      rp = rem.mod_p(p);
    } catch (const error&) {
      return JordanFailure{"characteristic factor has p in a denominator"};
    }
    if ((int)rp.size() - 1 != rem.degree())
      return JordanFailure{"leading coefficient degenerates mod p"};
    std::vector<uint64_t> g = fp_gcd(rp, fp_derivative(rp, p.value()), p.value());
    if (g.size() > 1) return JordanFailure{"characteristic factor not squarefree mod p"};
    for (uint64_t t = 0; t < p.value(); ++t)
      if (fp_eval(rp, t, p.value()) == 0) lifted_res.push_back(t);
    if ((int)lifted_res.size() != rem.degree())
      return JordanFailure{"characteristic factor does not split mod p"};
    for (uint64_t t : lifted_res)
      if (t == 0) return JordanFailure{"zero eigenvalue mod p"};
  }
  // Build eigen data: rational chains first (sorted by eigenvalue), then
  // Hensel-lifted simple roots (sorted by residue).
  std::sort(rational.begin(), rational.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::sort(lifted_res.begin(), lifted_res.end());

  JordanForm J;
  PadicMatrix B(p, n);
  int col = 0;
  for (const auto& [r, m] : rational) {
    RationalChains ch = rational_jordan_chains(L, r, m);
    int total = 0;
    for (int s : ch.sizes) total += s;
    if (total != m) return JordanFailure{"generalized eigenspace dimension mismatch"};
    for (const auto& v : ch.columns) {
      for (int i = 0; i < n; ++i)
        if (v[(size_t)i] != 0)
          B.at(i, col) = PadicNumber::embed_rational(v[(size_t)i], p, prec);
      ++col;
    }
    for (int s : ch.sizes)
      J.blocks.push_back({PadicNumber::embed_rational(r, p, prec), s});
  }
  if (rem.degree() > 0) {
    // Integer form of rem for lifting.
    Int den(1);
    for (const auto& x : rem.coeffs()) den = lcm(den, x.get_den());
    std::vector<Int> F;
    for (const auto& x : rem.coeffs()) F.push_back(x.get_num() * (den / x.get_den()));
    for (uint64_t t : lifted_res) {
      Int root = hensel_lift_root(F, t, p, prec);
      PadicNumber lam = PadicNumber::from_unit(p, 0, root, prec);
      PadicMatrix shifted = PadicMatrix::embed(L, p, prec);
      for (int i = 0; i < n; ++i) shifted.at(i, i) = shifted.at(i, i) - lam;
      std::vector<PadicNumber> v = kernel_vector(shifted);
      for (int i = 0; i < n; ++i) B.at(i, col) = v[(size_t)i];
      ++col;
      J.blocks.push_back({lam, 1});
    }
  }
  if (col != n) return JordanFailure{"eigenvector count mismatch"};
  if (!B.is_integral()) return JordanFailure{"basis not integral"};
  PadicNumber detB = B.det();
  if (detB.is_zero_like() || detB.valuation() != 0)
    return JordanFailure{"basis determinant is not a p-adic unit"};
  PadicMatrix Binv = B.inverse();
  if (!Binv.is_integral()) return JordanFailure{"inverse basis not integral"};
  // Verify B^{-1} L B equals the Jordan matrix to a comfortable precision.
  PadicMatrix JM = jordan_matrix(p, J, prec);
  PadicMatrix chk = Binv * PadicMatrix::embed(L, p, prec) * B;
  if (!chk.equals_to_precision(JM, prec / 2))
    return JordanFailure{"jordan form verification failed"};
  J.basis = B;
  J.basis_inv = Binv;
  return J;
}

} // namespace padicdyn
