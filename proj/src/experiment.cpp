#include "activelad/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "activelad/active.hpp"
#include "activelad/error.hpp"
#include "activelad/l1solve.hpp"

namespace activelad {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_distributional(const std::string& family) {
  return family == "biased_hypercube" || family == "two_coin" ||
         family == "hidden_coordinate";
}

// A realized regression problem for one trial.
struct TrialInstance {
  Matrix x;
  Vector y;
  double opt = 0.0;
  std::optional<DistributionalInstance> dist;
};

TrialInstance make_trial_instance(const InstanceSpec& spec, RngStream rng) {
  TrialInstance t;
  if (spec.family == "outlier" || spec.family == "isolated") {
    OutlierOptions o;
    o.noise_scale = spec.noise_scale;
    o.num_outliers = spec.num_outliers;
    o.isolated_direction = spec.family == "isolated";
    o.isolated_scale = spec.isolated_scale;
    auto inst = make_outlier_instance(spec.n, spec.d, spec.outlier_magnitude, rng, o);
    t.x = std::move(inst.x);
    t.y = std::move(inst.y);
    t.opt = inst.opt;
    return t;
  }
  if (spec.family == "files") {
    t.x = read_matrix_csv(spec.x_path);
    t.y = read_vector(spec.y_path);
    if (t.y.size() != t.x.rows()) {
      throw DataError(spec.y_path + ": " + std::to_string(t.y.size()) + " labels for " +
                      std::to_string(t.x.rows()) + " rows");
    }
  } else {
    const Family family = parse_family(spec.family);
    DistributionalInstance dist;
    if (family == Family::biased_hypercube) {
      const Codebook book = build_codebook(spec.d, rng);
      dist = DistributionalInstance::biased_hypercube(
          book.words[rng.uniform_index(book.words.size())], spec.bias);
    } else if (family == Family::two_coin) {
      dist = DistributionalInstance::two_coin(spec.d, spec.bias, rng.bernoulli(0.5));
    } else {
      dist = DistributionalInstance::hidden_coordinate(spec.d, rng.uniform_index(spec.d),
                                                       spec.bias);
    }
    auto data = reduce_to_matrix(dist, spec.reduction_eps, spec.reduction_delta, rng,
                                 spec.constants);
    t.x = std::move(data.x);
    t.y = std::move(data.y);
    t.dist = std::move(dist);
  }
  t.opt = solve_lad({t.x, t.y, {}}).objective;
  return t;
}

void finish_record(TrialRecord& rec, const TrialInstance& inst, double eps) {
  const double tiny = 1e-9 * std::max(1.0, l1_norm(inst.y));
  if (inst.opt > tiny) {
    rec.ratio = rec.objective / inst.opt;
  } else {
    rec.ratio = rec.objective <= tiny ? 1.0 : kInf;
  }
  rec.success = rec.ratio <= 1.0 + eps;
}

std::vector<TrialRecord> run_trial(const ExperimentSpec& spec, std::size_t trial,
                                   const TrialInstance* shared) {
  const RngStream root(spec.seed);
  std::optional<TrialInstance> own;
  if (!shared) own = make_trial_instance(spec.instance, root.derive("instance", trial));
  const TrialInstance& inst = shared ? *shared : *own;

  std::vector<TrialRecord> out;
  for (Method method : spec.methods) {
    std::optional<WeightVector> importance;
    std::string weight_error;
    try {
      switch (method) {
        case Method::lewis:
          importance = importance_weights(inst.x, Importance::lewis);
          break;
        case Method::uniform:
          importance = importance_weights(inst.x, Importance::uniform);
          break;
        case Method::leverage_l2_baseline:
          importance = importance_weights(inst.x, Importance::leverage);
          break;
        case Method::known_y_augmented:
          break;
      }
    } catch (const RankDeficientError&) {
      weight_error = "rank_deficient";
    }

    for (std::size_t budget : spec.budgets) {
      TrialRecord rec;
      rec.method = method;
      rec.budget = budget;
      rec.trial = trial;
      rec.opt = inst.opt;
      const RngStream sketch_rng =
          root.derive("trial", trial).derive(to_string(method), budget);
      try {
        if (!weight_error.empty()) throw RankDeficientError(weight_error);
        ActiveResult res;
        if (method == Method::known_y_augmented) {
          ActiveOptions opts;
          opts.eps = spec.eps;
          opts.delta = spec.delta;
          opts.budget = budget;
          res = sketch_and_solve_known_y(inst.x, inst.y, opts, sketch_rng, false);
        } else {
          VectorOracle oracle(inst.y);
          res = sample_and_solve(inst.x, oracle, *importance, budget, sketch_rng);
        }
        rec.distinct_labels = res.labels_queried;
        rec.objective = objective({inst.x, inst.y, {}}, res.beta_hat);
        rec.status = to_string(res.status);
        finish_record(rec, inst, spec.eps);
        if (inst.dist) {
          rec.distributional_ratio = expected_loss(*inst.dist, res.beta_hat) /
                                     expected_loss(*inst.dist, inst.dist->beta_star);
        }
      } catch (const RankDeficientError&) {
        rec.status = "rank_deficient";
        rec.objective = kInf;
        rec.ratio = kInf;
        rec.success = false;
      } catch (const InvalidArgument&) {
        rec.status = "refused";
        rec.objective = kInf;
        rec.ratio = kInf;
        rec.success = false;
      }
      out.push_back(std::move(rec));
    }
  }
  return out;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::lewis:
      return "lewis";
    case Method::uniform:
      return "uniform";
    case Method::leverage_l2_baseline:
      return "leverage_l2_baseline";
    case Method::known_y_augmented:
      return "known_y_augmented";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "lewis") return Method::lewis;
  if (name == "uniform") return Method::uniform;
  if (name == "leverage_l2_baseline") return Method::leverage_l2_baseline;
  if (name == "known_y_augmented") return Method::known_y_augmented;
  throw InvalidArgument("unknown method '" + name + "'");
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw InvalidArgument("experiment: trials must be at least 1");
  if (budgets.empty()) throw InvalidArgument("experiment: budget list is empty");
  if (!std::is_sorted(budgets.begin(), budgets.end())) {
    throw InvalidArgument("experiment: budgets must be sorted ascending");
  }
  if (budgets.front() == 0) throw InvalidArgument("experiment: budgets must be positive");
  if (methods.empty()) throw InvalidArgument("experiment: no methods");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("experiment: eps not in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("experiment: delta not in (0,1)");
  const auto& f = instance.family;
  if (f != "outlier" && f != "isolated" && f != "files" && !is_distributional(f)) {
    throw InvalidArgument("experiment: unknown instance family '" + f + "'");
  }
  if (f == "files" && (instance.x_path.empty() || instance.y_path.empty())) {
    throw InvalidArgument("experiment: files instance needs 'x' and 'y' paths");
  }
}

ExperimentSpec parse_experiment_spec(const Json& j) {
  ExperimentSpec spec;
  try {
    const Json& in = j.at("instance");
    auto& inst = spec.instance;
    inst.family = in.at("family").get<std::string>();
    inst.n = in.value("n", inst.n);
    inst.d = in.value("d", inst.d);
    inst.outlier_magnitude = in.value("outlier_magnitude", inst.outlier_magnitude);
    inst.noise_scale = in.value("noise_scale", inst.noise_scale);
    inst.num_outliers = in.value("num_outliers", inst.num_outliers);
    inst.isolated_scale = in.value("isolated_scale", inst.isolated_scale);
    inst.bias = in.value("bias", inst.bias);
    inst.reduction_eps = in.value("reduction_eps", inst.reduction_eps);
    inst.reduction_delta = in.value("reduction_delta", inst.reduction_delta);
    const auto constants = in.value("constants", std::string("proof"));
    if (constants == "proof") {
      inst.constants = ReductionConstants::proof;
    } else if (constants == "statement") {
      inst.constants = ReductionConstants::statement;
    } else {
      throw InvalidArgument("experiment: unknown reduction constants '" + constants + "'");
    }
    inst.x_path = in.value("x", std::string());
    inst.y_path = in.value("y", std::string());
    inst.regenerate = in.value("regenerate", inst.family != "files");

    spec.methods.clear();
    for (const auto& m : j.value("methods", Json::array({"lewis"})))
      spec.methods.push_back(parse_method(m.get<std::string>()));
    spec.budgets = j.at("budgets").get<std::vector<std::size_t>>();
    spec.eps = j.value("eps", spec.eps);
    spec.delta = j.value("delta", spec.delta);
    spec.trials = j.value("trials", spec.trials);
    spec.seed = j.value("seed", spec.seed);
    spec.threads = j.value("threads", spec.threads);
    spec.output = j.value("output", std::string());
    spec.curve_output = j.value("curve_output", std::string());
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("experiment spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

const Aggregate& ExperimentReport::aggregate(Method m, std::size_t budget) const {
  for (const auto& a : aggregates)
    if (a.method == m && a.budget == budget) return a;
  throw InvalidArgument("no aggregate for that method and budget");
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();

  std::optional<TrialInstance> shared;
  if (!spec.instance.regenerate || spec.instance.family == "files") {
    shared = make_trial_instance(spec.instance, RngStream(spec.seed).derive("instance", 0));
  }

  std::vector<std::vector<TrialRecord>> per_trial(spec.trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= spec.trials) return;
      try {
        per_trial[t] = run_trial(spec, t, shared ? &*shared : nullptr);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  unsigned threads = spec.threads ? spec.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(spec.trials)));
  {
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentReport report;
  report.spec = spec;
  for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
    for (std::size_t bi = 0; bi < spec.budgets.size(); ++bi) {
      Aggregate agg;
      agg.method = spec.methods[mi];
      agg.budget = spec.budgets[bi];
      std::vector<double> ratios;
      double ratio_sum = 0.0, labels_sum = 0.0;
      std::size_t finite = 0;
      for (std::size_t t = 0; t < spec.trials; ++t) {
        const TrialRecord& rec = per_trial[t][mi * spec.budgets.size() + bi];
        report.records.push_back(rec);
        ++agg.trials;
        agg.successes += rec.success ? 1 : 0;
        labels_sum += static_cast<double>(rec.distinct_labels);
        ratios.push_back(rec.ratio);
        if (std::isfinite(rec.ratio)) {
          ratio_sum += rec.ratio;
          ++finite;
        }
      }
      agg.success_rate = static_cast<double>(agg.successes) / static_cast<double>(agg.trials);
      std::tie(agg.ci_low, agg.ci_high) = wilson_interval(agg.successes, agg.trials);
      agg.mean_ratio = finite ? ratio_sum / static_cast<double>(finite) : kInf;
      std::sort(ratios.begin(), ratios.end());
      const std::size_t mid = ratios.size() / 2;
      agg.median_ratio =
          ratios.size() % 2 ? ratios[mid] : 0.5 * (ratios[mid - 1] + ratios[mid]);
      agg.mean_distinct_labels = labels_sum / static_cast<double>(agg.trials);
      report.aggregates.push_back(agg);
    }
  }
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Json ExperimentReport::to_json() const {
  Json methods = Json::array();
  for (Method m : spec.methods) methods.push_back(to_string(m));
  Json records_json = Json::array();
  for (const auto& r : records) {
    Json rec = {{"method", to_string(r.method)},
                {"budget", r.budget},
                {"trial", r.trial},
                {"distinct_labels", r.distinct_labels},
                {"objective", finite_or_null(r.objective)},
                {"opt", r.opt},
                {"ratio", finite_or_null(r.ratio)},
                {"success", r.success},
                {"status", r.status}};
    if (r.distributional_ratio) rec["distributional_ratio"] = *r.distributional_ratio;
    records_json.push_back(std::move(rec));
  }
  Json aggs = Json::array();
  for (const auto& a : aggregates) {
    aggs.push_back({{"method", to_string(a.method)},
                    {"budget", a.budget},
                    {"trials", a.trials},
                    {"successes", a.successes},
                    {"success_rate", a.success_rate},
                    {"ci_low", a.ci_low},
                    {"ci_high", a.ci_high},
                    {"mean_ratio", finite_or_null(a.mean_ratio)},
                    {"median_ratio", finite_or_null(a.median_ratio)},
                    {"mean_distinct_labels", a.mean_distinct_labels}});
  }
  const auto& in = spec.instance;
  Json instance = {{"family", in.family},
                   {"n", in.n},
                   {"d", in.d},
                   {"outlier_magnitude", in.outlier_magnitude},
                   {"noise_scale", in.noise_scale},
                   {"num_outliers", in.num_outliers},
                   {"isolated_scale", in.isolated_scale},
                   {"bias", in.bias},
                   {"reduction_eps", in.reduction_eps},
                   {"reduction_delta", in.reduction_delta},
                   {"constants", in.constants == ReductionConstants::proof ? "proof" : "statement"},
                   {"regenerate", in.regenerate}};
  if (in.family == "files") {
    instance["x"] = in.x_path;
    instance["y"] = in.y_path;
  }
  return {{"spec",
           {{"instance", std::move(instance)},
            {"methods", std::move(methods)},
            {"budgets", spec.budgets},
            {"eps", spec.eps},
            {"delta", spec.delta},
            {"trials", spec.trials},
            {"seed", spec.seed}}},
          {"records", std::move(records_json)},
          {"aggregates", std::move(aggs)},
          {"environment",
           {{"seed", spec.seed},
            {"version", kVersion},
            {"rng", std::string(RngStream::kAlgorithm)},
            {"timing", {{"elapsed_seconds", elapsed_seconds}}}}}};
}

std::string ExperimentReport::curve_csv() const {
  std::ostringstream out;
  out << "method,budget,trials,success_rate,ci_low,ci_high,mean_ratio\n";
  for (const auto& a : aggregates) {
    out << to_string(a.method) << ',' << a.budget << ',' << a.trials << ','
        << format_double(a.success_rate) << ',' << format_double(a.ci_low) << ','
        << format_double(a.ci_high) << ','
        << (std::isfinite(a.mean_ratio) ? format_double(a.mean_ratio) : "inf") << '\n';
  }
  return out.str();
}

Json strip_timing(Json report) {
  if (report.contains("environment")) report["environment"].erase("timing");
  return report;
}

}  // namespace activelad
