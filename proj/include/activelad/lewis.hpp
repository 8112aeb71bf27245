#pragma once

#include <cstddef>
#include <vector>

#include "activelad/linalg.hpp"

namespace activelad {

enum class ZeroRowPolicy { exclude };

struct LewisConfig {
  int max_iters = 200;
  /// Stop once the max relative defect of w_i^2 = x_i^T (X^T W^{-1} X)^{-1} x_i
  /// is at or below this.
  double tol = 1e-10;
  ZeroRowPolicy zero_row_policy = ZeroRowPolicy::exclude;

  void validate() const;
};

struct LewisResult {
  WeightVector weights;
  double residual = 0.0;
  int iterations = 0;
  /// Fixed-point defect before each update, starting from the all-ones guess.
  std::vector<double> residual_history;

  /// True if the defect never went up after the first five iterations.
  bool residual_monotone_after_warmup() const;
};

/// l1 Lewis weights by the fixed-point iteration w_i <- sqrt(x_i^T (X^T W^{-1} X)^{-1} x_i)
/// from w = 1. All-zero rows are left out of the iteration and get weight 0.
///
/// Throws RankDeficientError when the nonzero rows do not span R^d and
/// ConvergenceError (carrying the final defect) when max_iters runs out.
LewisResult compute_lewis_weights(const Matrix& x, const LewisConfig& cfg = {});

inline WeightVector lewis_weights(const Matrix& x, const LewisConfig& cfg = {}) {
  return compute_lewis_weights(x, cfg).weights;
}

/// max_i |w_i^2 - x_i^T (X^T W^{-1} X)^{-1} x_i| / max(w_i^2, 1e-30) over
/// nonzero rows. Pure check.
double verify_fixed_point(const Matrix& x, const WeightVector& w);

struct MonotonicityReport {
  bool holds = true;
  /// max over original rows of (stacked weight - original weight), clipped at 0.
  double max_violation = 0.0;
  WeightVector original;
  WeightVector stacked;  // weights of all rows of [X; extra]
};

/// Compares the Lewis weights of the rows of `x` before and after appending
/// `extra_rows`. Holds iff no original weight increases by more than `slack`.
MonotonicityReport check_row_addition_monotonicity(const Matrix& x, const Matrix& extra_rows,
                                                   double slack = 1e-7,
                                                   const LewisConfig& cfg = {});

/// p_i = N w_i / sum_j w_j, so that sum p_i = N.
WeightVector sampling_values(const WeightVector& w, std::size_t budget);

enum class Regime { high_prob, constant_prob };

const char* to_string(Regime regime) noexcept;
Regime parse_regime(const char* name);

inline constexpr double kDefaultBudgetConstant = 4.0;

/// Sample budget N for a (1+eps) guarantee:
///   high_prob:     ceil(C d / eps^2 * log(d / (eps delta)))
///   constant_prob: ceil(C d log(max(d, 2)) / eps^2)
std::size_t recommended_budget(std::size_t d, double eps, double delta, Regime regime,
                               double c = kDefaultBudgetConstant);

}  // namespace activelad
