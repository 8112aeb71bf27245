#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <tuple>

#include <unistd.h>

#include "activelad/active.hpp"
#include "activelad/error.hpp"
#include "activelad/experiment.hpp"
#include "activelad/io.hpp"
#include "activelad/oracle.hpp"
#include "test_support.hpp"

using namespace activelad;
using activelad::testing::gaussian_matrix;
using activelad::testing::gaussian_vector;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("activelad_io_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

}  // namespace

TEST_CASE("format_double round-trips bit-exactly") {
  RngStream rng(501);
  for (int k = 0; k < 1000; ++k) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform_index(40) - 20.0);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("matrix, vector, weights and solution files round-trip") {
  TempDir dir;
  RngStream rng(502);
  const Matrix x = gaussian_matrix(17, 4, rng);
  const Vector y = gaussian_vector(17, rng);
  write_matrix_csv(dir.file("x.csv"), x);
  write_vector(dir.file("y.txt"), y);
  CHECK(read_matrix_csv(dir.file("x.csv")) == x);
  CHECK(read_vector(dir.file("y.txt")) == y);

  const WeightVector w = lewis_weights(x);
  write_json(dir.file("w.json"), weights_to_json(w));
  const WeightVector back = weights_from_json(read_json(dir.file("w.json")));
  CHECK(back.kind == w.kind);
  CHECK(back.values == w.values);

  const LadSolution sol = solve_lad({x, y, {}});
  const Json js = solution_to_json(sol);
  write_json(dir.file("s.json"), js);
  const Json again = read_json(dir.file("s.json"));
  CHECK(again.at("beta").get<Vector>() == sol.beta);
  CHECK(again.at("objective").get<double>() == sol.objective);
  CHECK(again.dump() == js.dump());
}

TEST_CASE("malformed input names the offending line") {
  TempDir dir;
  write_text(dir.file("bad.csv"), "1,2,3\n4,5,6\n7,8\n");
  try {
    (void)read_matrix_csv(dir.file("bad.csv"));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.csv:3") != std::string::npos);
    CHECK(msg.find("expected 3 columns, found 2") != std::string::npos);
  }
  write_text(dir.file("bad.txt"), "1\n\n2.5\nabc\n");
  try {
    (void)read_vector(dir.file("bad.txt"));
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("bad.txt:4") != std::string::npos);
  }
  CHECK_THROWS_AS(read_matrix_csv(dir.file("missing.csv")), DataError);
  write_text(dir.file("nan.csv"), "1,nan\n");
  CHECK_THROWS_AS(read_matrix_csv(dir.file("nan.csv")), DataError);
}

TEST_CASE("file oracle reads only queried lines") {
  TempDir dir;
  write_text(dir.file("y.txt"), "10\n11\n\n12\n13\nxyz\n15\n");
  FileOracle o(dir.file("y.txt"));
  CHECK(o.size() == 6);
  CHECK(o.lines_read() == 0);
  CHECK(o.query(2) == 12.0);
  CHECK(o.query(0) == 10.0);
  CHECK(o.lines_read() == 2);
  try {
    (void)o.query(4);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("y.txt:6") != std::string::npos);
  }
  CHECK(o.query(5) == 15.0);
  CHECK_THROWS_AS(o.query(6), DimensionError);
}

TEST_CASE("active solve through a file oracle touches at most the distinct draws") {
  TempDir dir;
  RngStream rng(503);
  const Matrix x = gaussian_matrix(500, 3, rng);
  write_vector(dir.file("y.txt"), gaussian_vector(500, rng));
  ActiveOptions opts;
  opts.budget = 60;
  FileOracle a(dir.file("y.txt"));
  FileOracle b(dir.file("y.txt"));
  const ActiveResult ra = active_solve(x, a, opts, RngStream(4));
  const ActiveResult rb = active_solve(x, b, opts, RngStream(4));
  CHECK(a.lines_read() <= ra.sketch.distinct_indices().size());
  CHECK(a.lines_read() == a.query_count());
  CHECK(a.query_log() == b.query_log());
  CHECK(ra.beta_hat == rb.beta_hat);
}

TEST_CASE("wilson interval") {
  const auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.5962).epsilon(1e-3));
  const auto [lo0, hi0] = wilson_interval(0, 10);
  CHECK(lo0 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(hi0 == doctest::Approx(0.2775).epsilon(1e-3));
  const auto [lo1, hi1] = wilson_interval(10, 10);
  CHECK(hi1 == doctest::Approx(1.0));
  CHECK(lo1 == doctest::Approx(0.7225).epsilon(1e-3));
}

TEST_CASE("experiment spec validation") {
  Json j = Json::parse(R"({"instance": {"family": "outlier", "n": 50, "d": 2},
                           "budgets": [10, 20], "trials": 2})");
  CHECK_NOTHROW(parse_experiment_spec(j));
  j["budgets"] = {20, 10};
  CHECK_THROWS_AS(parse_experiment_spec(j), InvalidArgument);
  j["budgets"] = {10};
  j["trials"] = 0;
  CHECK_THROWS_AS(parse_experiment_spec(j), InvalidArgument);
  j["trials"] = 1;
  j["methods"] = {"bogus"};
  CHECK_THROWS_AS(parse_experiment_spec(j), InvalidArgument);
  j["methods"] = {"lewis"};
  j["instance"]["family"] = "nope";
  CHECK_THROWS_AS(parse_experiment_spec(j), InvalidArgument);
}

TEST_CASE("experiment reports are reproducible and ordered") {
  const Json j = Json::parse(R"({
    "instance": {"family": "outlier", "n": 120, "d": 3, "outlier_magnitude": 1000},
    "methods": ["lewis", "uniform", "leverage_l2_baseline", "known_y_augmented"],
    "budgets": [3, 12, 40], "eps": 0.25, "trials": 6, "seed": 42})");
  ExperimentSpec one = parse_experiment_spec(j);
  one.threads = 1;
  ExperimentSpec many = one;
  many.threads = 4;
  const ExperimentReport r1 = run_experiment(one);
  const ExperimentReport r2 = run_experiment(many);
  const ExperimentReport r3 = run_experiment(one);
  CHECK(strip_timing(r1.to_json()).dump() == strip_timing(r2.to_json()).dump());
  CHECK(strip_timing(r1.to_json()).dump() == strip_timing(r3.to_json()).dump());
  CHECK(r1.curve_csv() == r2.curve_csv());
  CHECK(r1.to_json().at("environment").contains("timing"));

  REQUIRE(r1.records.size() == 4 * 3 * 6);
  for (std::size_t k = 1; k < r1.records.size(); ++k) {
    const auto& a = r1.records[k - 1];
    const auto& b = r1.records[k];
    const auto key = [](const TrialRecord& r) {
      return std::make_tuple(static_cast<int>(r.method), r.budget, r.trial);
    };
    CHECK(key(a) < key(b));
  }
  for (const TrialRecord& rec : r1.records) {
    if (rec.opt > 0.0 && std::isfinite(rec.ratio)) CHECK(rec.ratio >= 1.0 - 1e-9);
    CHECK(rec.success == (rec.ratio <= 1.25));
    CHECK(rec.distinct_labels <= rec.budget);
  }
  // Budget 3 equals d: any sketch missing a direction is a recorded failure, not a crash.
  const Aggregate& tiny = r1.aggregate(Method::lewis, 3);
  CHECK(tiny.trials == 6);
}

TEST_CASE("a one-trial sweep matches a single active solve") {
  TempDir dir;
  RngStream rng(504);
  const Matrix x = gaussian_matrix(80, 2, rng);
  const Vector y = gaussian_vector(80, rng);
  write_matrix_csv(dir.file("x.csv"), x);
  write_vector(dir.file("y.txt"), y);
  Json j = {{"instance", {{"family", "files"}, {"x", dir.file("x.csv")}, {"y", dir.file("y.txt")}}},
            {"budgets", {15}},
            {"trials", 1},
            {"seed", 9}};
  const ExperimentSpec spec = parse_experiment_spec(j);
  const ExperimentReport rep = run_experiment(spec);
  REQUIRE(rep.records.size() == 1);

  // Same substream the harness assigns to (trial 0, lewis, budget 15).
  const RngStream stream = RngStream(9).derive("trial", 0).derive("lewis", 15);
  VectorOracle o(y);
  ActiveOptions opts;
  opts.budget = 15;
  const ActiveResult r = active_solve(x, o, opts, stream);
  CHECK(rep.records[0].objective == objective({x, y, {}}, r.beta_hat));
  CHECK(rep.records[0].distinct_labels == r.labels_queried);
}

TEST_CASE("distributional experiment records the distributional ratio") {
  const Json j = Json::parse(R"({
    "instance": {"family": "hidden_coordinate", "d": 3, "bias": 0.25,
                 "reduction_eps": 0.5, "reduction_delta": 0.2},
    "budgets": [6, 30], "trials": 3, "seed": 1})");
  const ExperimentReport rep = run_experiment(parse_experiment_spec(j));
  for (const TrialRecord& rec : rep.records) {
    if (rec.status == "optimal") CHECK(rec.distributional_ratio.has_value());
  }
}
