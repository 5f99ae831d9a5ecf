#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "padicdyn/padic.hpp"
#include "padicdyn/polynomial.hpp"

namespace padicdyn {

// Dense matrix over Q, exact arithmetic.
class QMatrix {
public:
  QMatrix() : n_(0) {}
  explicit QMatrix(int n) : n_(n), a_((size_t)n * n, Rat(0)) {}
  QMatrix(int n, std::vector<Rat> entries);
  static QMatrix identity(int n);

  int dim() const { return n_; }
  Rat& at(int i, int j) { return a_[(size_t)i * n_ + j]; }
  const Rat& at(int i, int j) const { return a_[(size_t)i * n_ + j]; }

  friend QMatrix operator+(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator-(const QMatrix& a, const QMatrix& b);
  friend QMatrix operator*(const QMatrix& a, const QMatrix& b);
  std::vector<Rat> apply(const std::vector<Rat>& v) const;
  QMatrix scaled(const Rat& s) const;
  QMatrix pow(unsigned long e) const;

  Rat det() const;
  std::optional<QMatrix> inverse() const;
  int rank() const;
  // Basis of the kernel (column vectors).
  std::vector<std::vector<Rat>> kernel() const;
  // Monic characteristic polynomial det(zI - A) via Faddeev-LeVerrier.
  UniPolyQ charpoly() const;

  std::string to_string() const;

private:
  int n_;
  std::vector<Rat> a_;
};

// Matrix over Q_p with precision-tracked entries.
class PadicMatrix {
public:
  PadicMatrix(const Prime& p, int n);
  static PadicMatrix identity(const Prime& p, int n, int prec = kDefaultPrecision);
  static PadicMatrix embed(const QMatrix& m, const Prime& p, int prec = kDefaultPrecision);

  const Prime& prime() const { return p_; }
  int dim() const { return n_; }
  PadicNumber& at(int i, int j) { return a_[(size_t)i * n_ + j]; }
  const PadicNumber& at(int i, int j) const { return a_[(size_t)i * n_ + j]; }

  friend PadicMatrix operator+(const PadicMatrix& a, const PadicMatrix& b);
  friend PadicMatrix operator-(const PadicMatrix& a, const PadicMatrix& b);
  friend PadicMatrix operator*(const PadicMatrix& a, const PadicMatrix& b);
  std::vector<PadicNumber> apply(const std::vector<PadicNumber>& v) const;
  PadicMatrix pow(unsigned long e) const;

  PadicNumber det() const;
  // Inverse by Gaussian elimination with minimal-valuation pivoting.
  PadicMatrix inverse() const;
  // Entrywise: every entry integral (valuation >= 0 or zero-like with
  // nonnegative bound)?
  bool is_integral() const;
  bool equals_to_precision(const PadicMatrix& other, long min_abs_prec) const;

  std::string to_string() const;

private:
  Prime p_;
  int n_;
  std::vector<PadicNumber> a_;
};

// Jordan data over Q_p: blocks on the diagonal of J = B^{-1} L B, with
// |lambda|_p = 1 for every eigenvalue and B, B^{-1} integral.
struct JordanBlock {
  PadicNumber lambda;
  int size;
};

struct JordanForm {
  std::vector<JordanBlock> blocks;
  std::optional<PadicMatrix> basis;     // B
  std::optional<PadicMatrix> basis_inv; // B^{-1}
  int dim() const {
    int n = 0;
    for (const auto& b : blocks) n += b.size;
    return n;
  }
};

// Assemble the explicit Jordan matrix (lambda on diagonal, 1 above).
PadicMatrix jordan_matrix(const Prime& p, const JordanForm& J, int prec = kDefaultPrecision);

struct JordanFailure {
  std::string reason;
};

// Jordan decomposition of a rational matrix over Q_p at prime p.  Succeeds
// when every eigenvalue lies in Q_p (rational, possibly repeated, or a simple
// Hensel-liftable root of the characteristic polynomial mod p), eigenvalues
// are p-adic units, and the resulting basis is integral with unit
// determinant; otherwise reports why so callers can try another prime.
std::variant<JordanForm, JordanFailure> jordan_decompose(const QMatrix& L, const Prime& p,
                                                         int prec = kDefaultPrecision);

} // namespace padicdyn
