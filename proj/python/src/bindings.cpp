// Python bindings. Arrays cross the boundary as float64 NumPy arrays; the
// experiment harness exchanges JSON text.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "activelad/active.hpp"
#include "activelad/error.hpp"
#include "activelad/experiment.hpp"
#include "activelad/instances.hpp"
#include "activelad/l1solve.hpp"
#include "activelad/lewis.hpp"
#include "activelad/sketch.hpp"

namespace py = pybind11;
using namespace activelad;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const Array& a) {
  if (a.ndim() != 2) throw DimensionError("expected a 2-d array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  const auto d = static_cast<std::size_t>(a.shape(1));
  return Matrix(n, d, std::vector<double>(a.data(), a.data() + n * d));
}

Vector to_vector(const Array& a) {
  if (a.ndim() != 1) throw DimensionError("expected a 1-d array");
  return Vector(a.data(), a.data() + a.shape(0));
}

Array to_array(const Vector& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Array to_array(const Matrix& m) {
  Array out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

// Labels come from a Python callable, so the caller sees exactly which rows
// were requested.
class CallableOracle final : public LabelOracle {
 public:
  CallableOracle(std::function<double(std::size_t)> f, std::size_t n)
      : f_(std::move(f)), n_(n) {}
  std::size_t size() const override { return n_; }

 protected:
  double fetch(std::size_t i) override { return f_(i); }

 private:
  std::function<double(std::size_t)> f_;
  std::size_t n_;
};

Importance parse_importance(const std::string& s) {
  if (s == "lewis") return Importance::lewis;
  if (s == "uniform") return Importance::uniform;
  if (s == "leverage") return Importance::leverage;
  throw InvalidArgument("unknown importance '" + s + "'");
}

py::dict result_dict(const ActiveResult& r) {
  py::dict out;
  out["beta"] = to_array(r.beta_hat);
  out["labels_queried"] = r.labels_queried;
  out["budget"] = r.budget;
  out["sketched_objective"] = r.sketched_objective;
  out["status"] = std::string(to_string(r.status));
  py::list idx, scale;
  for (const Draw& d : r.sketch.draws) {
    idx.append(d.index);
    scale.append(d.scale);
  }
  out["sketch_indices"] = idx;
  out["sketch_scales"] = scale;
  return out;
}

ActiveOptions make_options(double eps, double delta, std::optional<std::size_t> budget,
                           const std::string& regime, const std::string& importance) {
  ActiveOptions o;
  o.eps = eps;
  o.delta = delta;
  o.budget = budget;
  o.regime = parse_regime(regime.c_str());
  o.importance = parse_importance(importance);
  return o;
}

}  // namespace

PYBIND11_MODULE(_activelad, m) {
  m.doc() = "Active l1 regression by Lewis-weight row sampling";
  m.attr("__version__") = kVersion;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<RankDeficientError>(m, "RankDeficientError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());

  m.def(
      "lewis_weights",
      [](const Array& x, double tol, int max_iters) {
        LewisConfig cfg;
        cfg.tol = tol;
        cfg.max_iters = max_iters;
        const LewisResult r = compute_lewis_weights(to_matrix(x), cfg);
        return py::make_tuple(to_array(r.weights.values), r.residual, r.iterations);
      },
      py::arg("x"), py::arg("tol") = LewisConfig{}.tol, py::arg("max_iters") = 200,
      "l1 Lewis weights. Returns (weights, fixed-point residual, iterations).");

  m.def(
      "verify_fixed_point",
      [](const Array& x, const Array& w) {
        return verify_fixed_point(to_matrix(x), WeightVector{WeightKind::lewis, to_vector(w)});
      },
      py::arg("x"), py::arg("w"));

  m.def(
      "leverage_scores", [](const Array& x) { return to_array(leverage_scores(to_matrix(x)).values); },
      py::arg("x"));

  m.def(
      "recommended_budget",
      [](std::size_t d, double eps, double delta, const std::string& regime, double c) {
        return recommended_budget(d, eps, delta, parse_regime(regime.c_str()), c);
      },
      py::arg("d"), py::arg("eps"), py::arg("delta"), py::arg("regime") = "constant_prob",
      py::arg("c") = kDefaultBudgetConstant);

  m.def(
      "solve_lad",
      [](const Array& a, const Array& b, std::optional<Array> w, double tol, int max_iters) {
        LadProblem p{to_matrix(a), to_vector(b), w ? to_vector(*w) : Vector{}};
        const LadSolution s = solve_lad(p, tol, max_iters);
        py::dict out;
        out["beta"] = to_array(s.beta);
        out["objective"] = s.objective;
        out["status"] = std::string(to_string(s.status));
        out["iterations"] = s.iterations;
        out["optimality_gap_estimate"] = s.optimality_gap_estimate;
        out["basis"] = s.basis;
        out["certificate"] = to_array(s.certificate);
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("weights") = py::none(),
      py::arg("tol") = kDefaultLadTol, py::arg("max_iters") = kDefaultLadMaxIters,
      "Minimize sum_i w_i |a_i^T beta - b_i|.");

  m.def(
      "weighted_median",
      [](const Array& v, const Array& w) { return weighted_median_1d(to_vector(v), to_vector(w)); },
      py::arg("values"), py::arg("weights"));

  m.def(
      "draw_sketch",
      [](const Array& p, std::size_t budget, std::uint64_t seed, std::uint64_t stream) {
        const Sketch s =
            draw_sketch(WeightVector{WeightKind::sampling, to_vector(p)}, budget,
                        RngStream(seed, stream));
        py::list idx, scale;
        for (const Draw& d : s.draws) {
          idx.append(d.index);
          scale.append(d.scale);
        }
        return py::make_tuple(idx, scale);
      },
      py::arg("p"), py::arg("budget"), py::arg("seed"), py::arg("stream") = 0,
      "Sampling-and-reweighting sketch. p must sum to budget. Returns (indices, scales).");

  m.def(
      "active_solve",
      [](const Array& x, std::function<double(std::size_t)> label, double eps, double delta,
         std::optional<std::size_t> budget, std::uint64_t seed, const std::string& regime,
         const std::string& importance) {
        const Matrix xm = to_matrix(x);
        CallableOracle oracle(std::move(label), xm.rows());
        const ActiveResult r = active_solve(
            xm, oracle, make_options(eps, delta, budget, regime, importance), RngStream(seed));
        py::dict out = result_dict(r);
        out["query_log"] = oracle.query_log();
        return out;
      },
      py::arg("x"), py::arg("label"), py::arg("eps") = 0.25, py::arg("delta") = 0.1,
      py::arg("budget") = py::none(), py::arg("seed") = 0,
      py::arg("regime") = "constant_prob", py::arg("importance") = "lewis",
      "Active LAD regression. `label(i)` is called once per distinct sampled row.");

  m.def(
      "sketch_and_solve_known_y",
      [](const Array& x, const Array& y, double eps, double delta,
         std::optional<std::size_t> budget, std::uint64_t seed, bool guarantee_mode) {
        return result_dict(sketch_and_solve_known_y(
            to_matrix(x), to_vector(y), make_options(eps, delta, budget, "constant_prob", "lewis"),
            RngStream(seed), guarantee_mode));
      },
      py::arg("x"), py::arg("y"), py::arg("eps") = 0.25, py::arg("delta") = 0.1,
      py::arg("budget") = py::none(), py::arg("seed") = 0, py::arg("guarantee_mode") = true);

  m.def(
      "expected_loss",
      [](const std::string& family, const Array& beta_star, double bias, const Array& beta) {
        DistributionalInstance inst;
        inst.family = parse_family(family);
        inst.bias = bias;
        inst.beta_star = to_vector(beta_star);
        return expected_loss(inst, to_vector(beta));
      },
      py::arg("family"), py::arg("beta_star"), py::arg("bias"), py::arg("beta"));

  m.def(
      "make_outlier_instance",
      [](std::size_t n, std::size_t d, double magnitude, std::uint64_t seed, double noise,
         std::size_t num_outliers, bool isolated) {
        RngStream rng(seed);
        OutlierOptions o;
        o.noise_scale = noise;
        o.num_outliers = num_outliers;
        o.isolated_direction = isolated;
        const OutlierInstance inst = make_outlier_instance(n, d, magnitude, rng, o);
        py::dict out;
        out["x"] = to_array(inst.x);
        out["y"] = to_array(inst.y);
        out["beta_star"] = to_array(inst.beta_star);
        out["outlier_rows"] = inst.outlier_rows;
        out["opt"] = inst.opt;
        out["beta_opt"] = to_array(inst.beta_opt);
        return out;
      },
      py::arg("n"), py::arg("d"), py::arg("magnitude"), py::arg("seed") = 0,
      py::arg("noise") = 1.0, py::arg("num_outliers") = 1, py::arg("isolated") = false);

  m.def(
      "run_experiment",
      [](const std::string& spec_json) {
        const ExperimentSpec spec = parse_experiment_spec(Json::parse(spec_json));
        ExperimentReport report;
        {
          py::gil_scoped_release release;
          report = run_experiment(spec);
        }
        return report.to_json().dump();
      },
      py::arg("spec_json"), "Runs an experiment spec (JSON text) and returns the report as JSON text.");
}
