#include "activelad/active.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "activelad/error.hpp"

namespace activelad {
namespace {

void check_unit_interval(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) {
    throw InvalidArgument(std::string(name) + " must lie in (0, 1), got " + std::to_string(v));
  }
}

// |u - y| - |v - y|. When both residuals have the same sign the label cancels
// and the result is computed from u - v alone.
double abs_residual_difference(double u, double v, double y) {
  const double a = u - y;
  const double b = v - y;
  if (a >= 0.0 && b >= 0.0) return u - v;
  if (a <= 0.0 && b <= 0.0) return v - u;
  return std::abs(a) - std::abs(b);
}

}  // namespace

const char* to_string(Importance imp) noexcept {
  switch (imp) {
    case Importance::lewis:
      return "lewis";
    case Importance::uniform:
      return "uniform";
    case Importance::leverage:
      return "leverage";
  }
  return "unknown";
}

void ActiveOptions::validate() const {
  check_unit_interval(eps, "eps");
  check_unit_interval(delta, "delta");
  if (budget && *budget == 0) throw InvalidArgument("budget must be positive");
  lewis.validate();
}

WeightVector importance_weights(const Matrix& x, Importance imp, const LewisConfig& cfg) {
  switch (imp) {
    case Importance::lewis:
      return lewis_weights(x, cfg);
    case Importance::leverage:
      return leverage_scores(x);
    case Importance::uniform:
      return {WeightKind::lewis, Vector(x.rows(), 1.0)};
  }
  throw InvalidArgument("unknown importance kind");
}

ActiveResult sample_and_solve(const Matrix& x, LabelOracle& oracle,
                              const WeightVector& importance, std::size_t budget,
                              RngStream rng, double solver_tol, int solver_max_iters) {
  if (oracle.size() != x.rows()) {
    throw DimensionError("oracle holds " + std::to_string(oracle.size()) + " labels for " +
                         std::to_string(x.rows()) + " rows");
  }
  if (importance.size() != x.rows()) throw DimensionError("importance length mismatch");
  if (budget < x.cols()) {
    throw InvalidArgument("budget " + std::to_string(budget) + " is below d = " +
                          std::to_string(x.cols()) + "; beta cannot be determined");
  }

  ActiveResult result;
  result.budget = budget;
  result.sketch = draw_sketch(sampling_values(importance, budget), budget, rng);

  // Query set depends only on the sketch, never on answers.
  const auto distinct = result.sketch.distinct_indices();
  std::unordered_map<std::size_t, double> labels;
  labels.reserve(distinct.size());
  for (std::size_t i : distinct) labels.emplace(i, oracle.query(i));
  result.labels_queried = distinct.size();

  LadProblem erm;
  erm.a = apply_to_columns(result.sketch, x);
  erm.b.resize(budget);
  for (std::size_t k = 0; k < budget; ++k) {
    const auto& d = result.sketch.draws[k];
    erm.b[k] = d.scale * labels.at(d.index);
  }
  const LadSolution sol = solve_lad(erm, solver_tol, solver_max_iters);
  result.beta_hat = sol.beta;
  result.status = sol.status;
  result.sketched_objective = sol.objective;
  return result;
}

ActiveResult active_solve(const Matrix& x, LabelOracle& oracle, const ActiveOptions& opts,
                          RngStream rng) {
  opts.validate();
  x.require_finite();
  const std::size_t budget =
      opts.budget.value_or(recommended_budget(x.cols(), opts.eps, opts.delta, opts.regime,
                                              opts.budget_constant));
  const WeightVector w = importance_weights(x, opts.importance, opts.lewis);
  return sample_and_solve(x, oracle, w, budget, rng, opts.solver_tol, opts.solver_max_iters);
}

ActiveResult sketch_and_solve_known_y(const Matrix& x, std::span<const double> y,
                                      const ActiveOptions& opts, RngStream rng,
                                      bool guarantee_mode) {
  opts.validate();
  if (guarantee_mode && !(opts.eps < 1.0 / 3.0)) {
    throw InvalidArgument("known-label sketching needs eps < 1/3 for its guarantee");
  }
  if (y.size() != x.rows()) throw DimensionError("label length mismatch");
  x.require_finite();

  WeightVector w;
  try {
    w = lewis_weights(x.hstack(y), opts.lewis);
  } catch (const RankDeficientError&) {
    w = lewis_weights(x, opts.lewis);
  }
  const std::size_t budget =
      opts.budget.value_or(recommended_budget(x.cols() + 1, opts.eps, opts.delta, opts.regime,
                                              opts.budget_constant));
  VectorOracle oracle(Vector(y.begin(), y.end()));
  return sample_and_solve(x, oracle, w, budget, rng, opts.solver_tol, opts.solver_max_iters);
}

double relative_error_gap(const Matrix& x, std::span<const double> y, const Sketch& s,
                          std::span<const double> beta_star, std::span<const double> beta) {
  if (y.size() != x.rows() || s.source_n != x.rows()) {
    throw DimensionError("relative_error_gap: row count mismatch");
  }
  if (beta_star.size() != x.cols() || beta.size() != x.cols()) {
    throw DimensionError("relative_error_gap: coefficient length mismatch");
  }
  const Vector fit_star = matvec(x, beta_star);
  const Vector fit = matvec(x, beta);

  CompensatedSum full, sketched, scale;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    full.add(abs_residual_difference(fit_star[i], fit[i], y[i]));
    scale.add(std::abs(fit_star[i] - fit[i]));
  }
  for (const auto& d : s.draws) {
    sketched.add(d.scale * abs_residual_difference(fit_star[d.index], fit[d.index], y[d.index]));
  }
  const double denom = scale.value();
  if (denom == 0.0) return 0.0;
  return (sketched.value() - full.value()) / denom;
}

}  // namespace activelad
