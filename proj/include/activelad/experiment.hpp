#pragma once

// Monte Carlo harness. Every (method, budget, trial) run is certified against
// the full-data LAD optimum; success rates get Wilson intervals.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "activelad/instances.hpp"
#include "activelad/io.hpp"

namespace activelad {

inline constexpr const char* kVersion = "0.1.0";

enum class Method { lewis, uniform, leverage_l2_baseline, known_y_augmented };

const char* to_string(Method m) noexcept;
Method parse_method(const std::string& name);

struct InstanceSpec {
  /// outlier | isolated | files | <distributional family>
  std::string family = "outlier";
  std::size_t n = 2000;
  std::size_t d = 10;
  double outlier_magnitude = 1e6;
  double noise_scale = 1.0;
  std::size_t num_outliers = 1;
  double isolated_scale = 1.0;
  // Distributional families.
  double bias = 0.1;
  double reduction_eps = 0.2;
  double reduction_delta = 0.05;
  ReductionConstants constants = ReductionConstants::proof;
  // "files"
  std::string x_path;
  std::string y_path;
  /// Draw a fresh instance for every trial (ignored for "files").
  bool regenerate = true;
};

struct ExperimentSpec {
  InstanceSpec instance;
  std::vector<Method> methods{Method::lewis};
  std::vector<std::size_t> budgets;
  double eps = 0.25;
  double delta = 0.1;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
  std::string output;
  std::string curve_output;

  void validate() const;
};

ExperimentSpec parse_experiment_spec(const Json& j);

struct TrialRecord {
  Method method = Method::lewis;
  std::size_t budget = 0;
  std::size_t trial = 0;
  std::size_t distinct_labels = 0;
  double objective = 0.0;
  double opt = 0.0;
  /// objective / OPT; 1 when both vanish, infinity when the sketch could not
  /// determine beta.
  double ratio = 0.0;
  bool success = false;
  std::string status;
  /// Distributional families only: E|x^T beta_hat - y| / E|x^T beta* - y|.
  std::optional<double> distributional_ratio;
};

struct Aggregate {
  Method method = Method::lewis;
  std::size_t budget = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double mean_ratio = 0.0;    // over trials with a finite ratio
  double median_ratio = 0.0;  // over all trials (infinite ratios sort last)
  double mean_distinct_labels = 0.0;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<TrialRecord> records;  // ordered by (method, budget, trial)
  std::vector<Aggregate> aggregates;
  double elapsed_seconds = 0.0;

  const Aggregate& aggregate(Method m, std::size_t budget) const;

  /// Full report. Timing lives only under "environment"/"timing".
  Json to_json() const;
  /// CSV lines: method,budget,trials,success_rate,ci_low,ci_high,mean_ratio
  std::string curve_csv() const;
};

/// 95% Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials);

ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Copy of a report JSON with the timing block removed, for comparisons.
Json strip_timing(Json report);

}  // namespace activelad
