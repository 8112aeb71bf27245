// Command-line front end.
//
//   activelad weights X.csv [--kind lewis|leverage] [--tol T] [--out FILE]
//   activelad solve X.csv y.txt [--mode full|sketch_known_y|active] [--eps E]
//                   [--delta D] [--budget N] [--seed S] [--out FILE]
//   activelad experiment SPEC.json [--out FILE] [--curve FILE]
//   activelad gen --family F [--n N] [--d D] ... --x-out X.csv --y-out y.txt
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 numerical failure.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "activelad/active.hpp"
#include "activelad/error.hpp"
#include "activelad/experiment.hpp"
#include "activelad/instances.hpp"
#include "activelad/io.hpp"
#include "activelad/lewis.hpp"
#include "activelad/oracle.hpp"

namespace {

using namespace activelad;
using Clock = std::chrono::steady_clock;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void emit(const Json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json(out, j);
  }
}

struct WeightsArgs {
  std::string x_path;
  std::string kind = "lewis";
  double tol = LewisConfig{}.tol;
  std::string out;
};

int run_weights(const WeightsArgs& a) {
  const Matrix x = read_matrix_csv(a.x_path);
  Json j;
  if (a.kind == "lewis") {
    LewisConfig cfg;
    cfg.tol = a.tol;
    const LewisResult r = compute_lewis_weights(x, cfg);
    j = weights_to_json(r.weights);
    j["header"] = {{"residual", r.residual},
                   {"iterations", r.iterations},
                   {"sum", r.weights.sum()},
                   {"d", x.cols()}};
  } else {
    const WeightVector w = leverage_scores(x);
    j = weights_to_json(w);
    // Leverage scores sum to the rank, i.e. d for full-rank input.
    j["header"] = {{"trace", w.sum()},
                   {"trace_defect", std::abs(w.sum() - static_cast<double>(x.cols()))},
                   {"d", x.cols()}};
  }
  emit(j, a.out);
  return kOk;
}

struct SolveArgs {
  std::string x_path;
  std::string y_path;
  std::string mode = "full";
  double eps = 0.25;
  double delta = 0.1;
  std::optional<std::size_t> budget;
  std::uint64_t seed = 0;
  std::string out;
};

int run_solve(const SolveArgs& a) {
  const auto t0 = Clock::now();
  const Matrix x = read_matrix_csv(a.x_path);
  Json j;
  j["mode"] = a.mode;
  j["seed"] = a.seed;
  j["rng"] = std::string(RngStream::kAlgorithm);

  ActiveOptions opts;
  opts.eps = a.eps;
  opts.delta = a.delta;
  opts.budget = a.budget;

  if (a.mode == "active") {
    FileOracle oracle(a.y_path);
    if (oracle.size() != x.rows()) {
      throw DataError(a.y_path + ": " + std::to_string(oracle.size()) + " labels for " +
                      std::to_string(x.rows()) + " rows");
    }
    const ActiveResult r = active_solve(x, oracle, opts, RngStream(a.seed));
    j["beta"] = r.beta_hat;
    // Only the sketched objective is observable without the full label vector.
    j["sketched_objective"] = r.sketched_objective;
    j["budget"] = r.budget;
    j["labels_queried"] = r.labels_queried;
    j["label_lines_read"] = oracle.lines_read();
    j["query_log"] = oracle.query_log();
    j["status"] = to_string(r.status);
  } else {
    const Vector y = read_vector(a.y_path);
    if (y.size() != x.rows()) {
      throw DataError(a.y_path + ": " + std::to_string(y.size()) + " labels for " +
                      std::to_string(x.rows()) + " rows");
    }
    if (a.mode == "full") {
      const LadSolution s = solve_lad({x, y, {}});
      j["beta"] = s.beta;
      j["objective"] = s.objective;
      j["labels_queried"] = y.size();
      j["status"] = to_string(s.status);
      j["iterations"] = s.iterations;
      j["optimality_gap_estimate"] = s.optimality_gap_estimate;
    } else if (a.mode == "sketch_known_y") {
      const ActiveResult r = sketch_and_solve_known_y(x, y, opts, RngStream(a.seed));
      j["beta"] = r.beta_hat;
      j["objective"] = objective({x, y, {}}, r.beta_hat);
      j["sketched_objective"] = r.sketched_objective;
      j["budget"] = r.budget;
      j["labels_queried"] = r.labels_queried;
      j["status"] = to_string(r.status);
    } else {
      throw InvalidArgument("unknown mode '" + a.mode + "'");
    }
  }
  j["timing"] = {{"seconds", seconds_since(t0)}};
  emit(j, a.out);
  return kOk;
}

struct ExperimentArgs {
  std::string spec_path;
  std::string out;
  std::string curve;
};

int run_experiment_cmd(const ExperimentArgs& a) {
  ExperimentSpec spec;
  try {
    spec = parse_experiment_spec(read_json(a.spec_path));
  } catch (const InvalidArgument& e) {
    throw DataError(a.spec_path + ": " + e.what());
  }
  if (!a.out.empty()) spec.output = a.out;
  if (!a.curve.empty()) spec.curve_output = a.curve;
  const ExperimentReport report = run_experiment(spec);
  emit(report.to_json(), spec.output);
  if (!spec.curve_output.empty()) {
    std::ofstream csv(spec.curve_output);
    if (!csv) throw DataError("cannot write '" + spec.curve_output + "'");
    csv << report.curve_csv();
  }
  return kOk;
}

struct GenArgs {
  std::string family = "outlier";
  std::size_t n = 2000;
  std::size_t d = 10;
  double magnitude = 1e6;
  double noise = 1.0;
  std::size_t outliers = 1;
  double isolated_scale = 1.0;
  double bias = 0.1;
  double eps = 0.2;
  double delta = 0.05;
  std::string constants = "proof";
  std::uint64_t seed = 0;
  std::string x_out;
  std::string y_out;
  std::string meta_out;
};

int run_gen(const GenArgs& a) {
  RngStream rng(a.seed);
  Json meta;
  meta["family"] = a.family;
  meta["seed"] = a.seed;
  Matrix x;
  Vector y;
  if (a.family == "outlier" || a.family == "isolated") {
    OutlierOptions o;
    o.noise_scale = a.noise;
    o.num_outliers = a.outliers;
    o.isolated_direction = a.family == "isolated";
    o.isolated_scale = a.isolated_scale;
    OutlierInstance inst = make_outlier_instance(a.n, a.d, a.magnitude, rng, o);
    meta["beta_star"] = inst.beta_star;
    meta["outlier_rows"] = inst.outlier_rows;
    meta["opt"] = inst.opt;
    meta["beta_opt"] = inst.beta_opt;
    if (o.isolated_direction) meta["isolated_row"] = inst.isolated_row;
    x = std::move(inst.x);
    y = std::move(inst.y);
  } else {
    const Family fam = parse_family(a.family);
    DistributionalInstance dist;
    if (fam == Family::biased_hypercube) {
      const Codebook book = build_codebook(a.d, rng);
      dist = DistributionalInstance::biased_hypercube(
          book.words[rng.uniform_index(book.words.size())], a.bias);
    } else if (fam == Family::two_coin) {
      dist = DistributionalInstance::two_coin(a.d, a.bias, rng.bernoulli(0.5));
    } else {
      dist = DistributionalInstance::hidden_coordinate(a.d, rng.uniform_index(a.d), a.bias);
    }
    ReductionConstants c;
    if (a.constants == "proof") {
      c = ReductionConstants::proof;
    } else if (a.constants == "statement") {
      c = ReductionConstants::statement;
    } else {
      throw InvalidArgument("unknown constants '" + a.constants + "'");
    }
    LabeledData data = reduce_to_matrix(dist, a.eps, a.delta, rng, c);
    meta["beta_star"] = dist.beta_star;
    meta["bias"] = dist.bias;
    meta["expected_loss_at_beta_star"] = expected_loss(dist, dist.beta_star);
    x = std::move(data.x);
    y = std::move(data.y);
  }
  meta["n"] = x.rows();
  meta["d"] = x.cols();
  write_matrix_csv(a.x_out, x);
  write_vector(a.y_out, y);
  if (!a.meta_out.empty()) write_json(a.meta_out, meta);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active l1 regression via Lewis-weight sampling"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  WeightsArgs wa;
  auto* weights = app.add_subcommand("weights", "Lewis weights or leverage scores of a matrix");
  weights->add_option("x", wa.x_path, "design matrix CSV")->required();
  weights->add_option("--kind", wa.kind)->check(CLI::IsMember({"lewis", "leverage"}));
  weights->add_option("--tol", wa.tol, "fixed-point tolerance")->check(CLI::PositiveNumber);
  weights->add_option("--out", wa.out, "output JSON (default stdout)");

  SolveArgs sa;
  std::size_t budget = 0;
  auto* solve = app.add_subcommand("solve", "Full, known-label sketched, or active LAD solve");
  solve->add_option("x", sa.x_path, "design matrix CSV")->required();
  solve->add_option("y", sa.y_path, "labels, one per line")->required();
  solve->add_option("--mode", sa.mode)
      ->check(CLI::IsMember({"full", "sketch_known_y", "active"}));
  solve->add_option("--eps", sa.eps);
  solve->add_option("--delta", sa.delta);
  auto* budget_opt = solve->add_option("--budget", budget, "sketch rows N");
  solve->add_option("--seed", sa.seed);
  solve->add_option("--out", sa.out, "output JSON (default stdout)");

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo success-rate sweep");
  experiment->add_option("spec", ea.spec_path, "experiment spec JSON")->required();
  experiment->add_option("--out", ea.out, "report JSON (overrides the spec)");
  experiment->add_option("--curve", ea.curve, "curve CSV (overrides the spec)");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate an instance as CSV files");
  gen->add_option("--family", ga.family)
      ->check(CLI::IsMember(
          {"outlier", "isolated", "biased_hypercube", "two_coin", "hidden_coordinate"}));
  gen->add_option("--n", ga.n);
  gen->add_option("--d", ga.d);
  gen->add_option("--magnitude", ga.magnitude, "outlier magnitude");
  gen->add_option("--noise", ga.noise, "noise standard deviation");
  gen->add_option("--outliers", ga.outliers, "number of planted outliers");
  gen->add_option("--isolated-scale", ga.isolated_scale);
  gen->add_option("--bias", ga.bias, "label bias of distributional families");
  gen->add_option("--eps", ga.eps, "reduction accuracy");
  gen->add_option("--delta", ga.delta, "reduction failure probability");
  gen->add_option("--constants", ga.constants)->check(CLI::IsMember({"proof", "statement"}));
  gen->add_option("--seed", ga.seed);
  gen->add_option("--x-out", ga.x_out)->required();
  gen->add_option("--y-out", ga.y_out)->required();
  gen->add_option("--meta-out", ga.meta_out, "instance metadata JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*weights) return run_weights(wa);
    if (*solve) {
      if (budget_opt->count() > 0) sa.budget = budget;
      return run_solve(sa);
    }
    if (*experiment) return run_experiment_cmd(ea);
    if (*gen) return run_gen(ga);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const RankDeficientError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const ConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << " (residual " << e.residual() << ")\n";
    return kNumerical;
  } catch (const InvalidArgument& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  }
  return kUsage;
}
