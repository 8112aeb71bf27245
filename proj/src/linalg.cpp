#include "activelad/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "activelad/error.hpp"

namespace activelad {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

double l1_norm(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(std::abs(x));
  return s.value();
}

double max_abs(std::span<const double> xs) noexcept {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows_ * cols_) {
    throw DimensionError("Matrix: data length " + std::to_string(data_.size()) +
                         " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionError("Matrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::is_row_zero(std::size_t i) const {
  const auto r = row(i);
  return std::all_of(r.begin(), r.end(), [](double v) { return v == 0.0; });
}

double Matrix::max_abs_entry() const noexcept { return max_abs(data_); }

void Matrix::require_finite() const {
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!std::isfinite(data_[k])) {
      throw InvalidArgument("non-finite entry at (" + std::to_string(k / cols_) + ", " +
                            std::to_string(k % cols_) + ")");
    }
  }
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
  Matrix out(idx.size(), cols_);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= rows_) throw DimensionError("select_rows: index out of range");
    std::copy_n(row(idx[k]).begin(), cols_, out.row(k).begin());
  }
  return out;
}

Matrix Matrix::vstack(const Matrix& below) const {
  if (below.rows() == 0) return *this;
  if (rows_ == 0) return below;
  if (below.cols() != cols_) throw DimensionError("vstack: column count mismatch");
  std::vector<double> data = data_;
  data.insert(data.end(), below.data_.begin(), below.data_.end());
  return Matrix(rows_ + below.rows(), cols_, std::move(data));
}

Matrix Matrix::hstack(std::span<const double> column) const {
  if (column.size() != rows_) throw DimensionError("hstack: column length mismatch");
  Matrix out(rows_, cols_ + 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    std::copy_n(row(i).begin(), cols_, out.row(i).begin());
    out(i, cols_) = column[i];
  }
  return out;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw DimensionError("matvec: length mismatch");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector matvec_transpose(const Matrix& a, std::span<const double> y) {
  if (y.size() != a.rows()) throw DimensionError("matvec_transpose: length mismatch");
  Vector x(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) x[j] += r[j] * y[i];
  }
  return x;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

namespace {

// Upper triangle accumulated with per-entry compensation, then mirrored.
Matrix accumulate_gram(const Matrix& x, std::span<const double> scale) {
  const std::size_t d = x.cols();
  std::vector<CompensatedSum> acc(d * d);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double s = scale[i];
    if (s == 0.0) continue;
    const auto r = x.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      const double ra = s * r[a];
      if (ra == 0.0) continue;
      for (std::size_t b = a; b < d; ++b) acc[a * d + b].add(ra * r[b]);
    }
  }
  Matrix g(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      g(a, b) = acc[a * d + b].value();
      g(b, a) = g(a, b);
    }
  return g;
}

}  // namespace

Matrix gram_weighted(const Matrix& x, std::span<const double> w) {
  if (w.size() != x.rows()) {
    throw DimensionError("gram_weighted: " + std::to_string(w.size()) + " weights for " +
                         std::to_string(x.rows()) + " rows");
  }
  std::vector<double> scale(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) {
      scale[i] = 1.0 / w[i];
    } else if (x.is_row_zero(i)) {
      scale[i] = 0.0;
    } else {
      throw InvalidArgument("gram_weighted: nonpositive weight on nonzero row " +
                            std::to_string(i));
    }
  }
  return accumulate_gram(x, scale);
}

Matrix gram_scaled(const Matrix& x, std::span<const double> scale) {
  if (scale.size() != x.rows()) throw DimensionError("gram_scaled: length mismatch");
  for (double s : scale)
    if (!(s >= 0.0)) throw InvalidArgument("gram_scaled: negative or NaN scale");
  return accumulate_gram(x, scale);
}

Matrix gram(const Matrix& x) {
  const std::vector<double> ones(x.rows(), 1.0);
  return accumulate_gram(x, ones);
}

// ---------------------------------------------------------------------------
// SpdFactorization

SpdFactorization::SpdFactorization(const Matrix& a, double min_pivot_rel)
    : n_(a.rows()), perm_(a.rows()) {
  if (a.rows() != a.cols()) throw DimensionError("SpdFactorization: matrix not square");
  if (n_ == 0) throw DimensionError("SpdFactorization: empty matrix");

  Matrix w = a;
  for (std::size_t k = 0; k < n_; ++k) perm_[k] = k;

  double max_diag = 0.0;
  for (std::size_t k = 0; k < n_; ++k) max_diag = std::max(max_diag, w(k, k));
  const double floor = min_pivot_rel * max_diag;
  if (!(max_diag > 0.0)) throw RankDeficientError("SpdFactorization: zero matrix");

  min_pivot_ = max_diag;
  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t piv = k;
    for (std::size_t j = k + 1; j < n_; ++j)
      if (w(j, j) > w(piv, piv)) piv = j;
    if (!(w(piv, piv) > floor)) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "matrix is numerically rank deficient: pivot %.3g below %.3g at step %zu of %zu",
                    w(piv, piv), floor, k, n_);
      throw RankDeficientError(msg);
    }
    if (piv != k) {
      std::swap(perm_[k], perm_[piv]);
      for (std::size_t j = 0; j < n_; ++j) std::swap(w(k, j), w(piv, j));
      for (std::size_t j = 0; j < n_; ++j) std::swap(w(j, k), w(j, piv));
    }
    min_pivot_ = std::min(min_pivot_, w(k, k));
    const double lkk = std::sqrt(w(k, k));
    w(k, k) = lkk;
    for (std::size_t i = k + 1; i < n_; ++i) w(i, k) /= lkk;
    for (std::size_t i = k + 1; i < n_; ++i) {
      const double lik = w(i, k);
      for (std::size_t j = k + 1; j <= i; ++j) {
        w(i, j) -= lik * w(j, k);
        w(j, i) = w(i, j);
      }
    }
  }
  l_ = Matrix(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j <= i; ++j) l_(i, j) = w(i, j);
}

Vector SpdFactorization::forward(std::span<const double> b) const {
  if (b.size() != n_) throw DimensionError("SpdFactorization: rhs length mismatch");
  Vector y(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= l_(i, j) * y[j];
    y[i] = s / l_(i, i);
  }
  return y;
}

Vector SpdFactorization::solve(std::span<const double> b) const {
  Vector y = forward(b);
  for (std::size_t ii = n_; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n_; ++j) s -= l_(j, ii) * y[j];
    y[ii] = s / l_(ii, ii);
  }
  Vector z(n_);
  for (std::size_t k = 0; k < n_; ++k) z[perm_[k]] = y[k];
  return z;
}

double SpdFactorization::quadratic_form(std::span<const double> v) const {
  const Vector y = forward(v);
  double s = 0.0;
  for (double t : y) s += t * t;
  return s;
}

Matrix SpdFactorization::reconstruct() const {
  Matrix llt(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= std::min(i, j); ++k) s += l_(i, k) * l_(j, k);
      llt(i, j) = s;
    }
  Matrix out(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out(perm_[i], perm_[j]) = llt(i, j);
  return out;
}

// ---------------------------------------------------------------------------
// LuFactorization

LuFactorization::LuFactorization(const Matrix& a, double min_pivot_rel)
    : n_(a.rows()), lu_(a), perm_(a.rows()) {
  if (a.rows() != a.cols()) throw DimensionError("LuFactorization: matrix not square");
  for (std::size_t k = 0; k < n_; ++k) perm_[k] = k;
  const double floor = min_pivot_rel * std::max(a.max_abs_entry(), 1e-300);
  for (std::size_t k = 0; k < n_; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n_; ++i)
      if (std::abs(lu_(i, k)) > std::abs(lu_(piv, k))) piv = i;
    if (!(std::abs(lu_(piv, k)) > floor)) {
      throw RankDeficientError("LuFactorization: singular matrix at column " +
                               std::to_string(k));
    }
    if (piv != k) {
      std::swap(perm_[k], perm_[piv]);
      for (std::size_t j = 0; j < n_; ++j) std::swap(lu_(k, j), lu_(piv, j));
    }
    for (std::size_t i = k + 1; i < n_; ++i) {
      const double f = lu_(i, k) / lu_(k, k);
      lu_(i, k) = f;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n_; ++j) lu_(i, j) -= f * lu_(k, j);
    }
  }
}

Vector LuFactorization::solve(std::span<const double> b) const {
  if (b.size() != n_) throw DimensionError("LuFactorization: rhs length mismatch");
  Vector y(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = b[perm_[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
    y[i] = s;
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n_; ++j) s -= lu_(ii, j) * y[j];
    y[ii] = s / lu_(ii, ii);
  }
  return y;
}

Vector LuFactorization::solve_transpose(std::span<const double> b) const {
  // P A = L U  =>  A^T = U^T L^T P, so solve U^T t = b, L^T u = t, z = P^T u.
  if (b.size() != n_) throw DimensionError("LuFactorization: rhs length mismatch");
  Vector t(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= lu_(j, i) * t[j];
    t[i] = s / lu_(i, i);
  }
  for (std::size_t ii = n_; ii-- > 0;) {
    double s = t[ii];
    for (std::size_t j = ii + 1; j < n_; ++j) s -= lu_(j, ii) * t[j];
    t[ii] = s;
  }
  Vector z(n_);
  for (std::size_t k = 0; k < n_; ++k) z[perm_[k]] = t[k];
  return z;
}

// ---------------------------------------------------------------------------

const char* to_string(WeightKind kind) noexcept {
  switch (kind) {
    case WeightKind::lewis:
      return "lewis";
    case WeightKind::leverage:
      return "leverage";
    case WeightKind::sampling:
      return "sampling";
  }
  return "unknown";
}

WeightVector leverage_scores(const Matrix& x) {
  if (x.empty()) throw DimensionError("leverage_scores: empty matrix");
  const SpdFactorization f(gram(x));
  WeightVector out{WeightKind::leverage, Vector(x.rows())};
  for (std::size_t i = 0; i < x.rows(); ++i) out.values[i] = f.quadratic_form(x.row(i));
  return out;
}

}  // namespace activelad
