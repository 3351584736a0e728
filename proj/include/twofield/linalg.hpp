/**
 * @file linalg.hpp
 * @brief CSR matrices, Jacobi-preconditioned conjugate gradients, and a
 *        dense Cholesky path used as an oracle for small systems.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace twofield {

using Vector = std::vector<double>;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Row-major dense square matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  [[nodiscard]] std::size_t size() const { return n_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * n_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * n_ + c]; }

  [[nodiscard]] Vector multiply(std::span<const double> x) const {
    if (x.size() != n_) throw DimensionMismatch("DenseMatrix::multiply: size mismatch");
    Vector y(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < n_; ++c) s += data_[r * n_ + c] * x[c];
      y[r] = s;
    }
    return y;
  }

 private:
  std::size_t n_ = 0;
  Vector data_;
};

/// Square sparse matrix in compressed sparse row form. Column indices are
/// sorted within each row and unique.
class CsrMatrix {
 public:
  CsrMatrix() = default;

  /// Sums duplicate entries. Summation order is the (row, col, input order)
  /// order, so the result does not depend on how triplets were batched.
  static CsrMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets) {
    for (const auto& t : triplets) {
      if (t.row < 0 || t.col < 0 || static_cast<std::size_t>(t.row) >= n ||
          static_cast<std::size_t>(t.col) >= n) {
        throw DimensionMismatch("CsrMatrix::from_triplets: entry out of range");
      }
    }
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    CsrMatrix m;
    m.n_ = n;
    m.row_offsets_.assign(n + 1, 0);
    for (std::size_t i = 0; i < triplets.size();) {
      const int r = triplets[i].row;
      const int c = triplets[i].col;
      double v = 0.0;
      for (; i < triplets.size() && triplets[i].row == r && triplets[i].col == c; ++i) {
        v += triplets[i].value;
      }
      m.col_indices_.push_back(c);
      m.values_.push_back(v);
      ++m.row_offsets_[r + 1];
    }
    std::partial_sum(m.row_offsets_.begin(), m.row_offsets_.end(), m.row_offsets_.begin());
    return m;
  }

  static CsrMatrix identity(std::size_t n) {
    std::vector<Triplet> t;
    t.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.push_back({static_cast<int>(i), static_cast<int>(i), 1.0});
    return from_triplets(n, std::move(t));
  }

  [[nodiscard]] std::size_t n_rows() const { return n_; }
  [[nodiscard]] std::size_t n_cols() const { return n_; }
  [[nodiscard]] std::size_t nnz() const { return values_.size(); }
  [[nodiscard]] const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
  [[nodiscard]] const std::vector<int>& col_indices() const { return col_indices_; }
  [[nodiscard]] const Vector& values() const { return values_; }

  /// Entry (r, c), zero if not stored.
  [[nodiscard]] double at(std::size_t r, std::size_t c) const {
    const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[r]);
    const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[r + 1]);
    const auto it = std::lower_bound(first, last, static_cast<int>(c));
    return (it != last && *it == static_cast<int>(c))
               ? values_[static_cast<std::size_t>(it - col_indices_.begin())]
               : 0.0;
  }

  [[nodiscard]] Vector diagonal() const {
    Vector d(n_, 0.0);
    for (std::size_t r = 0; r < n_; ++r) d[r] = at(r, r);
    return d;
  }

  void multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != n_ || y.size() != n_) {
      throw DimensionMismatch("spmv: matrix is " + std::to_string(n_) + "x" +
                              std::to_string(n_) + ", vector sizes " +
                              std::to_string(x.size()) + "/" + std::to_string(y.size()));
    }
    for (std::size_t r = 0; r < n_; ++r) {
      double s = 0.0;
      for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
        s += values_[k] * x[col_indices_[k]];
      }
      y[r] = s;
    }
  }

  /// Largest |A - A^T| entry relative to the largest |A| entry.
  [[nodiscard]] double symmetry_defect() const {
    double amax = 0.0;
    double dmax = 0.0;
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
        amax = std::max(amax, std::abs(values_[k]));
        dmax = std::max(dmax, std::abs(values_[k] - at(col_indices_[k], r)));
      }
    }
    return amax > 0.0 ? dmax / amax : 0.0;
  }

  [[nodiscard]] DenseMatrix to_dense() const {
    DenseMatrix d(n_);
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
        d(r, col_indices_[k]) = values_[k];
      }
    }
    return d;
  }

  /// MatrixMarket coordinate/real/general dump, 1-based indices.
  void write_matrix_market(std::ostream& os) const {
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << n_ << ' ' << n_ << ' ' << nnz() << '\n';
    os << std::setprecision(17);
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
        os << r + 1 << ' ' << col_indices_[k] + 1 << ' ' << values_[k] << '\n';
      }
    }
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<int> col_indices_;
  Vector values_;
};

inline Vector spmv(const CsrMatrix& a, std::span<const double> x) {
  Vector y(a.n_rows(), 0.0);
  a.multiply(x, y);
  return y;
}

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
  /// sqrt(r^T D^{-1} r) at every iterate, starting with the initial guess.
  std::vector<double> preconditioned_residuals;
};

struct CgOptions {
  double tol = 1e-12;
  int max_iter = 0;  // 0 selects 10 n
};

/// Jacobi-preconditioned conjugate gradients from a zero initial guess.
/// Stops once ||b - Ax|| <= tol ||b||; non-convergence is reported, not thrown.
inline std::pair<Vector, SolveReport> cg_solve(const CsrMatrix& a, std::span<const double> b,
                                               const CgOptions& opts = {}) {
  const std::size_t n = a.n_rows();
  if (b.size() != n) {
    throw DimensionMismatch("cg_solve: rhs has " + std::to_string(b.size()) +
                            " entries, matrix has " + std::to_string(n) + " rows");
  }
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * std::max<std::size_t>(n, 1));
  Vector x(n, 0.0);
  SolveReport report;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    report.converged = true;
    report.preconditioned_residuals.push_back(0.0);
    return {x, report};
  }

  Vector inv_diag = a.diagonal();
  for (double& d : inv_diag) {
    if (!(d > 0.0)) throw NotPositiveDefinite("cg_solve: non-positive diagonal entry");
    d = 1.0 / d;
  }

  Vector r(b.begin(), b.end());
  Vector z(n), p(n), ap(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  report.preconditioned_residuals.push_back(std::sqrt(rz));
  double rnorm = bnorm;

  int it = 0;
  while (it < max_iter && rnorm > opts.tol * bnorm) {
    a.multiply(p, ap);
    const double pap = dot(p, ap);
    if (pap < 0.0 || std::isnan(pap)) {
      throw NotPositiveDefinite("cg_solve: search direction with p^T A p < 0");
    }
    if (pap == 0.0) break;
    const double step = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * ap[i];
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rnorm = norm2(r);
    report.preconditioned_residuals.push_back(std::sqrt(std::max(rz, 0.0)));
    ++it;
  }

  // Recurrence residuals drift; report the true one.
  Vector ax = spmv(a, x);
  for (std::size_t i = 0; i < n; ++i) ax[i] = b[i] - ax[i];
  report.iterations = it;
  report.relative_residual = norm2(ax) / bnorm;
  report.converged = report.relative_residual <= opts.tol;
  return {x, report};
}

/// Lower-triangular Cholesky factor L with A = L L^T.
class Cholesky {
 public:
  explicit Cholesky(const DenseMatrix& a) : l_(a.size()) {
    const std::size_t n = a.size();
    for (std::size_t j = 0; j < n; ++j) {
      double d = a(j, j);
      for (std::size_t k = 0; k < j; ++k) d -= l_(j, k) * l_(j, k);
      if (!(d > 0.0)) {
        throw NotPositiveDefinite("Cholesky: pivot " + std::to_string(j) + " is " +
                                  std::to_string(d) + "; matrix is not positive definite");
      }
      const double ljj = std::sqrt(d);
      l_(j, j) = ljj;
      for (std::size_t i = j + 1; i < n; ++i) {
        double s = a(i, j);
        for (std::size_t k = 0; k < j; ++k) s -= l_(i, k) * l_(j, k);
        l_(i, j) = s / ljj;
      }
    }
  }

  [[nodiscard]] Vector solve(std::span<const double> b) const {
    const std::size_t n = l_.size();
    if (b.size() != n) throw DimensionMismatch("Cholesky::solve: size mismatch");
    Vector y(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < i; ++k) y[i] -= l_(i, k) * y[k];
      y[i] /= l_(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      for (std::size_t k = ii + 1; k < n; ++k) y[ii] -= l_(k, ii) * y[k];
      y[ii] /= l_(ii, ii);
    }
    return y;
  }

  /// Smallest eigenvalue of A by inverse iteration (Rayleigh quotient of A^{-1}).
  [[nodiscard]] double smallest_eigenvalue(int iterations = 500, double rtol = 1e-12) const {
    const std::size_t n = l_.size();
    Vector v(n);
    // Deterministic start with components along every eigenvector in practice.
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * std::sin(static_cast<double>(i) + 1.0);
    double nv = norm2(v);
    for (double& e : v) e /= nv;
    double mu = 0.0;
    for (int it = 0; it < iterations; ++it) {
      Vector w = solve(v);
      const double mu_next = dot(v, w);  // approximates 1 / lambda_min
      nv = norm2(w);
      for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nv;
      if (it > 0 && std::abs(mu_next - mu) <= rtol * std::abs(mu_next)) {
        mu = mu_next;
        break;
      }
      mu = mu_next;
    }
    return 1.0 / mu;
  }

  static constexpr std::size_t kMaxDim = 5000;

 private:
  DenseMatrix l_;
};

/// Dense SPD solve; throws NotPositiveDefinite if factorisation breaks down.
inline Vector dense_solve(const DenseMatrix& a, std::span<const double> b) {
  if (a.size() > Cholesky::kMaxDim) {
    throw std::invalid_argument("dense_solve: dimension " + std::to_string(a.size()) +
                                " exceeds " + std::to_string(Cholesky::kMaxDim));
  }
  return Cholesky(a).solve(b);
}

inline double smallest_eigenvalue(const DenseMatrix& a) {
  if (a.size() > Cholesky::kMaxDim) {
    throw std::invalid_argument("smallest_eigenvalue: dimension too large");
  }
  return Cholesky(a).smallest_eigenvalue();
}

}  // namespace twofield
