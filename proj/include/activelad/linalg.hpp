#pragma once

// Dense real kernels used by the weight computations and the LAD solver.
// Matrices are small in the column dimension (d up to a few hundred), so
// everything here is straightforward row-major code with compensated sums.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace activelad {

using Vector = std::vector<double>;

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> xs) noexcept;
double l1_norm(std::span<const double> xs) noexcept;
double max_abs(std::span<const double> xs) noexcept;
double dot(std::span<const double> a, std::span<const double> b);

/// Dense row-major matrix. Used as the design matrix X (n x d) as well as
/// for small square work matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  const std::vector<double>& data() const noexcept { return data_; }

  bool is_row_zero(std::size_t i) const;
  double max_abs_entry() const noexcept;

  /// Throws InvalidArgument on NaN/Inf entries.
  void require_finite() const;

  Matrix transpose() const;
  Matrix select_rows(std::span<const std::size_t> idx) const;
  /// Rows of *this followed by the rows of `below`. Column counts must match.
  Matrix vstack(const Matrix& below) const;
  /// Appends `column` as a new last column.
  Matrix hstack(std::span<const double> column) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Vector matvec(const Matrix& a, std::span<const double> x);
Vector matvec_transpose(const Matrix& a, std::span<const double> y);
Matrix matmul(const Matrix& a, const Matrix& b);

/// Sum over rows of (1/w_j) x_j x_j^T. Rows with w_j == 0 must be all-zero
/// and are skipped. The result is symmetrized, so it is exactly symmetric.
Matrix gram_weighted(const Matrix& x, std::span<const double> w);

/// Sum over rows of scale_j x_j x_j^T for nonnegative scales.
Matrix gram_scaled(const Matrix& x, std::span<const double> scale);

/// X^T X, same accumulation as gram_weighted with unit weights.
Matrix gram(const Matrix& x);

/// Diagonally pivoted Cholesky factorization P^T A P = L L^T of a symmetric
/// positive-definite matrix. Construction fails with RankDeficientError when
/// the next pivot drops below min_pivot_rel * max(diag(A)).
class SpdFactorization {
 public:
  static constexpr double kDefaultMinPivot = 1e-12;

  explicit SpdFactorization(const Matrix& a, double min_pivot_rel = kDefaultMinPivot);

  std::size_t dim() const noexcept { return n_; }

  /// Solves A z = b.
  Vector solve(std::span<const double> b) const;

  /// v^T A^{-1} v, evaluated as a squared norm so it is never negative.
  double quadratic_form(std::span<const double> v) const;

  /// Smallest accepted pivot (a diagonal entry of L squared).
  double min_pivot() const noexcept { return min_pivot_; }

  /// P L L^T P^T, for checking the factorization.
  Matrix reconstruct() const;

 private:
  Vector forward(std::span<const double> b) const;  // L^{-1} P^T b

  std::size_t n_ = 0;
  Matrix l_;
  std::vector<std::size_t> perm_;  // perm_[k] = original index of pivot k
  double min_pivot_ = 0.0;
};

/// LU factorization with partial pivoting for general square systems.
class LuFactorization {
 public:
  explicit LuFactorization(const Matrix& a, double min_pivot_rel = 1e-13);

  std::size_t dim() const noexcept { return n_; }
  Vector solve(std::span<const double> b) const;             // A z = b
  Vector solve_transpose(std::span<const double> b) const;   // A^T z = b

 private:
  std::size_t n_ = 0;
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

enum class WeightKind { lewis, leverage, sampling };

const char* to_string(WeightKind kind) noexcept;

/// Per-row nonnegative importance values with a tag saying what they are.
struct WeightVector {
  WeightKind kind = WeightKind::lewis;
  Vector values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double sum() const noexcept { return compensated_sum(values); }
};

/// l_i = x_i^T (X^T X)^{-1} x_i. Throws RankDeficientError if X is not of
/// full column rank.
WeightVector leverage_scores(const Matrix& x);

}  // namespace activelad
