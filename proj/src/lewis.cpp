#include "activelad/lewis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>

#include "activelad/error.hpp"

namespace activelad {
namespace {

constexpr double kTinyWeight = 1e-30;

std::vector<std::size_t> nonzero_rows(const Matrix& x) {
  std::vector<std::size_t> idx;
  idx.reserve(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    if (!x.is_row_zero(i)) idx.push_back(i);
  return idx;
}

// Quadratic forms q_i = x_i^T (X^T W^{-1} X)^{-1} x_i and the defect of w against them.
double defect(const Matrix& x, std::span<const double> w, std::vector<double>& q) {
  const SpdFactorization f(gram_weighted(x, w));
  q.resize(x.rows());
  double worst = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    q[i] = f.quadratic_form(x.row(i));
    const double w2 = w[i] * w[i];
    worst = std::max(worst, std::abs(w2 - q[i]) / std::max(w2, kTinyWeight));
  }
  return worst;
}

}  // namespace

void LewisConfig::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("LewisConfig: tol must be positive");
  if (max_iters < 1) throw InvalidArgument("LewisConfig: max_iters must be at least 1");
}

bool LewisResult::residual_monotone_after_warmup() const {
  for (std::size_t k = 6; k < residual_history.size(); ++k)
    if (residual_history[k] > residual_history[k - 1]) return false;
  return true;
}

LewisResult compute_lewis_weights(const Matrix& x, const LewisConfig& cfg) {
  cfg.validate();
  if (x.empty()) throw DimensionError("lewis_weights: empty matrix");
  x.require_finite();

  const auto keep = nonzero_rows(x);
  if (keep.size() < x.cols()) {
    throw RankDeficientError("lewis_weights: " + std::to_string(keep.size()) +
                             " nonzero rows cannot span " + std::to_string(x.cols()) +
                             " columns");
  }
  const Matrix xs = keep.size() == x.rows() ? x : x.select_rows(keep);

  LewisResult result;
  std::vector<double> w(xs.rows(), 1.0);
  std::vector<double> q;
  for (;;) {
    const double r = defect(xs, w, q);
    result.residual = r;
    result.residual_history.push_back(r);
    if (r <= cfg.tol) break;
    if (result.iterations >= cfg.max_iters) {
      char msg[120];
      std::snprintf(msg, sizeof msg,
                    "lewis_weights: no convergence after %d iterations, residual %.3g",
                    cfg.max_iters, r);
      throw ConvergenceError(msg, r);
    }
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sqrt(q[i]);
    ++result.iterations;
  }

  result.weights = {WeightKind::lewis, Vector(x.rows(), 0.0)};
  for (std::size_t k = 0; k < keep.size(); ++k) result.weights.values[keep[k]] = w[k];
  return result;
}

double verify_fixed_point(const Matrix& x, const WeightVector& w) {
  if (w.size() != x.rows()) throw DimensionError("verify_fixed_point: length mismatch");
  const auto keep = nonzero_rows(x);
  const Matrix xs = x.select_rows(keep);
  std::vector<double> ws(keep.size());
  for (std::size_t k = 0; k < keep.size(); ++k) {
    ws[k] = w[keep[k]];
    if (!(ws[k] > 0.0)) {
      throw InvalidArgument("verify_fixed_point: nonpositive weight on nonzero row " +
                            std::to_string(keep[k]));
    }
  }
  std::vector<double> q;
  return defect(xs, ws, q);
}

MonotonicityReport check_row_addition_monotonicity(const Matrix& x, const Matrix& extra_rows,
                                                   double slack, const LewisConfig& cfg) {
  if (extra_rows.rows() > 0 && extra_rows.cols() != x.cols()) {
    throw DimensionError("check_row_addition_monotonicity: column count mismatch");
  }
  MonotonicityReport report;
  report.original = lewis_weights(x, cfg);
  report.stacked = lewis_weights(x.vstack(extra_rows), cfg);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double increase = report.stacked[i] - report.original[i];
    report.max_violation = std::max(report.max_violation, increase);
  }
  report.holds = report.max_violation <= slack;
  return report;
}

WeightVector sampling_values(const WeightVector& w, std::size_t budget) {
  if (budget == 0) throw InvalidArgument("sampling_values: budget must be positive");
  if (w.kind == WeightKind::sampling) {
    throw InvalidArgument("sampling_values: input is already a sampling vector");
  }
  for (double v : w.values)
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("sampling_values: weights must be finite and nonnegative");
    }
  const double total = w.sum();
  if (!(total > 0.0)) throw InvalidArgument("sampling_values: all weights are zero");
  WeightVector p{WeightKind::sampling, Vector(w.size())};
  const double scale = static_cast<double>(budget) / total;
  for (std::size_t i = 0; i < w.size(); ++i) p.values[i] = w[i] * scale;
  return p;
}

const char* to_string(Regime regime) noexcept {
  return regime == Regime::high_prob ? "high_prob" : "constant_prob";
}

Regime parse_regime(const char* name) {
  if (std::strcmp(name, "high_prob") == 0) return Regime::high_prob;
  if (std::strcmp(name, "constant_prob") == 0) return Regime::constant_prob;
  throw InvalidArgument(std::string("unknown regime '") + name + "'");
}

std::size_t recommended_budget(std::size_t d, double eps, double delta, Regime regime,
                               double c) {
  if (d == 0) throw InvalidArgument("recommended_budget: d must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("recommended_budget: eps not in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw InvalidArgument("recommended_budget: delta not in (0,1)");
  }
  if (!(c > 0.0)) throw InvalidArgument("recommended_budget: constant must be positive");
  const double dd = static_cast<double>(d);
  const double raw = regime == Regime::high_prob
                         ? c * dd / (eps * eps) * std::log(dd / (eps * delta))
                         : c * dd * std::log(std::max(dd, 2.0)) / (eps * eps);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw)));
}

}  // namespace activelad
