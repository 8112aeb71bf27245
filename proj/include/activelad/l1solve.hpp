#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "activelad/linalg.hpp"

namespace activelad {

/// Weighted least-absolute-deviation problem: minimize sum_i w_i |a_i^T beta - b_i|.
struct LadProblem {
  Matrix a;
  Vector b;
  Vector weights;  // empty means all ones

  double weight(std::size_t i) const { return weights.empty() ? 1.0 : weights[i]; }
  void validate() const;
};

enum class LadStatus { optimal, max_iter, degenerate };

const char* to_string(LadStatus status) noexcept;

struct LadSolution {
  Vector beta;
  double objective = 0.0;
  /// When status is optimal: |primal - dual| / primal for the dual point built
  /// from the certificate (roundoff level). Otherwise the amount by which the
  /// best certificate leaves [-1, 1].
  double optimality_gap_estimate = 0.0;
  int iterations = 0;
  LadStatus status = LadStatus::optimal;
  /// d rows (original indices) interpolated exactly by beta.
  std::vector<std::size_t> basis;
  /// Subgradient certificate s with s_i = sign(residual_i) off the basis and
  /// A^T (w .* s) = 0. Zero for rows with zero weight.
  Vector certificate;
};

inline constexpr double kDefaultLadTol = 1e-8;
inline constexpr int kDefaultLadMaxIters = 1000;

/// Smoothed IRLS warm start followed by vertex polishing (simplex-style edge
/// descent with exact line searches). Zero-weight rows are dropped and exact
/// duplicate (row, label) pairs are merged before solving.
///
/// Throws RankDeficientError if the positively weighted rows do not span R^d.
/// Running out of iterations is reported through status = max_iter together
/// with the best iterate, not thrown.
LadSolution solve_lad(const LadProblem& prob, double tol = kDefaultLadTol,
                      int max_iters = kDefaultLadMaxIters);

/// sum_i w_i |a_i^T beta - b_i| with compensated summation.
double objective(const LadProblem& prob, std::span<const double> beta);

/// A minimizer of sum_i w_i |v_i - beta|. When the minimizers form an
/// interval, returns its left endpoint.
double weighted_median_1d(std::span<const double> values, std::span<const double> weights);

}  // namespace activelad
