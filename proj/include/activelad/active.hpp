#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "activelad/l1solve.hpp"
#include "activelad/lewis.hpp"
#include "activelad/linalg.hpp"
#include "activelad/oracle.hpp"
#include "activelad/rng.hpp"
#include "activelad/sketch.hpp"

namespace activelad {

/// Which per-row importance the sampler uses.
enum class Importance { lewis, uniform, leverage };

const char* to_string(Importance imp) noexcept;

struct ActiveOptions {
  double eps = 0.25;
  double delta = 0.1;
  Regime regime = Regime::constant_prob;
  /// Number of sketch rows N. When unset, recommended_budget(d, eps, delta, regime, C).
  std::optional<std::size_t> budget;
  double budget_constant = kDefaultBudgetConstant;
  Importance importance = Importance::lewis;
  LewisConfig lewis;
  double solver_tol = kDefaultLadTol;
  int solver_max_iters = kDefaultLadMaxIters;

  void validate() const;
};

struct ActiveResult {
  Vector beta_hat;
  /// Distinct rows whose label was requested.
  std::size_t labels_queried = 0;
  /// Sketch rows N (draws, counting repeats).
  std::size_t budget = 0;
  Sketch sketch;
  LadStatus status = LadStatus::optimal;
  /// ||S X beta_hat - S y||_1.
  double sketched_objective = 0.0;
};

/// Importance values of the requested kind for the rows of x (not yet scaled
/// to a budget).
WeightVector importance_weights(const Matrix& x, Importance imp, const LewisConfig& cfg = {});

/// Draws S from p = sampling_values(importance, budget), asks the oracle for
/// the label of each distinct sampled row once (ascending index order), and
/// returns argmin ||S X beta - S y||_1. Repeated draws keep their multiplicity
/// in the objective but cost one query.
ActiveResult sample_and_solve(const Matrix& x, LabelOracle& oracle,
                              const WeightVector& importance, std::size_t budget,
                              RngStream rng, double solver_tol = kDefaultLadTol,
                              int solver_max_iters = kDefaultLadMaxIters);

/// Active l1 regression: importance weights of X, budget, sketch, label
/// queries, sketched ERM. Budgets below d are refused.
ActiveResult active_solve(const Matrix& x, LabelOracle& oracle, const ActiveOptions& opts,
                          RngStream rng);

/// Sketch-and-solve when all of y is known: samples by the Lewis weights of
/// [X y] so that the sketch embeds the residual space. In guarantee mode the
/// (1+4 eps) argument needs eps < 1/3, so larger eps is refused. If y lies in
/// the column space of X (so [X y] is rank deficient) the weights of X are used.
/// The default budget is recommended_budget(d + 1, ...).
ActiveResult sketch_and_solve_known_y(const Matrix& x, std::span<const double> y,
                                      const ActiveOptions& opts, RngStream rng,
                                      bool guarantee_mode = true);

/// [(||SXb*-Sy|| - ||SXb-Sy||) - (||Xb*-y|| - ||Xb-y||)] / ||X(b*-b)||, all l1
/// norms, or 0 when X(b* - b) = 0. Differences are taken row by row so a huge
/// label on an unsampled row cancels exactly.
double relative_error_gap(const Matrix& x, std::span<const double> y, const Sketch& s,
                          std::span<const double> beta_star, std::span<const double> beta);

}  // namespace activelad
