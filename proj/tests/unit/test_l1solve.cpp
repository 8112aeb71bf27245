#include <doctest.h>

#include <cmath>

#include "activelad/error.hpp"
#include "activelad/l1solve.hpp"
#include "test_support.hpp"

using namespace activelad;
using activelad::testing::brute_force_weighted_l1_min;
using activelad::testing::gaussian_matrix;
using activelad::testing::gaussian_vector;

namespace {

LadProblem random_problem(std::size_t m, std::size_t d, RngStream& rng, bool weighted) {
  LadProblem p{gaussian_matrix(m, d, rng), gaussian_vector(m, rng), {}};
  // Heavy-tailed labels so the LAD and least-squares fits differ.
  for (auto& b : p.b) b += rng.bernoulli(0.1) ? 50.0 * rng.normal() : 0.0;
  if (weighted) {
    p.weights.resize(m);
    for (auto& w : p.weights) w = rng.bernoulli(0.1) ? 0.0 : std::exp(rng.normal());
  }
  return p;
}

// Largest entry of A^T (w .* s), where s is the returned certificate.
double stationarity(const LadProblem& p, const LadSolution& sol) {
  double worst = 0.0;
  for (std::size_t j = 0; j < p.a.cols(); ++j) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < p.a.rows(); ++i) acc.add(p.a(i, j) * p.weight(i) * sol.certificate[i]);
    worst = std::max(worst, std::abs(acc.value()));
  }
  return worst;
}

}  // namespace

TEST_CASE("median and interpolation examples") {
  const LadSolution med = solve_lad(LadProblem{Matrix(3, 1, 1.0), {0, 1, 10}, {}});
  CHECK(med.beta[0] == doctest::Approx(1.0));
  CHECK(med.objective == doctest::Approx(10.0));
  CHECK(med.status == LadStatus::optimal);

  const LadSolution interp = solve_lad(LadProblem{Matrix::identity(2), {3, -5}, {}});
  CHECK(interp.beta[0] == doctest::Approx(3.0));
  CHECK(interp.beta[1] == doctest::Approx(-5.0));
  CHECK(interp.objective == doctest::Approx(0.0));

  const LadSolution wmed = solve_lad(LadProblem{Matrix(4, 1, 1.0), {0, 1, 2, 100}, {1, 1, 1, 5}});
  double brute_arg = 0.0;
  const double brute = brute_force_weighted_l1_min({0, 1, 2, 100}, {1, 1, 1, 5}, &brute_arg);
  CHECK(brute_arg == 100.0);
  CHECK(wmed.beta[0] == doctest::Approx(100.0));
  CHECK(wmed.objective == doctest::Approx(brute));
}

TEST_CASE("weighted_median_1d") {
  CHECK(weighted_median_1d(Vector{0, 1, 10}, Vector{1, 1, 1}) == 1.0);
  CHECK(weighted_median_1d(Vector{0, 2}, Vector{1, 1}) == 0.0);
  CHECK(weighted_median_1d(Vector{2, 0}, Vector{1, 1}) == 0.0);
  CHECK(weighted_median_1d(Vector{5, -1, 3}, Vector{0, 0, 2}) == 3.0);
  CHECK_THROWS_AS(weighted_median_1d(Vector{}, Vector{}), InvalidArgument);
  CHECK_THROWS_AS(weighted_median_1d(Vector{1}, Vector{0}), InvalidArgument);
}

TEST_CASE("d=1 solves match the brute-force weighted median") {
  RngStream rng(201);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = 1 + rng.uniform_index(30);
    Vector v = gaussian_vector(m, rng);
    Vector w(m);
    for (auto& x : w) x = 0.05 + rng.uniform();
    // Occasional ties in value.
    if (m > 3) v[1] = v[0];
    double arg = 0.0;
    const double brute = brute_force_weighted_l1_min(v, w, &arg);
    const double med = weighted_median_1d(v, w);
    CHECK(med == arg);
    const LadSolution sol = solve_lad(LadProblem{Matrix(m, 1, 1.0), v, w});
    CHECK(std::abs(sol.objective - brute) <= 1e-8 * std::max(1.0, brute));
  }
}

TEST_CASE("d=1 with a non-constant column matches the scaled weighted median") {
  RngStream rng(202);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t m = 2 + rng.uniform_index(20);
    Matrix a(m, 1);
    Vector b = gaussian_vector(m, rng);
    Vector v(m), w(m);
    for (std::size_t i = 0; i < m; ++i) {
      a(i, 0) = rng.normal();
      // |a_i beta - b_i| = |a_i| |beta - b_i / a_i|
      v[i] = b[i] / a(i, 0);
      w[i] = std::abs(a(i, 0));
    }
    const double brute = brute_force_weighted_l1_min(v, w);
    const LadSolution sol = solve_lad(LadProblem{a, b, {}});
    CHECK(std::abs(sol.objective - brute) <= 1e-8 * std::max(1.0, brute));
  }
}

TEST_CASE("objective") {
  CHECK(objective(LadProblem{Matrix::identity(2), {1, 2}, {}}, Vector{1, 2}) == 0.0);
  CHECK(objective(LadProblem{Matrix::identity(2), {1, -1}, {}}, Vector{0, 0}) == 2.0);
  RngStream rng(203);
  const LadProblem p = random_problem(40, 4, rng, true);
  const Vector beta = gaussian_vector(4, rng);
  double naive = 0.0;
  for (std::size_t i = 0; i < 40; ++i) {
    double r = -p.b[i];
    for (std::size_t j = 0; j < 4; ++j) r += p.a(i, j) * beta[j];
    naive += p.weights[i] * std::abs(r);
  }
  CHECK(std::abs(objective(p, beta) - naive) <= 1e-12 * naive);
  CHECK_THROWS_AS(objective(p, Vector{1, 2}), DimensionError);
}

TEST_CASE("no random direction beats the solution and the certificate is valid") {
  RngStream rng(204);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t d = 1 + rng.uniform_index(6);
    const std::size_t m = d + 1 + rng.uniform_index(80);
    const LadProblem p = random_problem(m, d, rng, rep % 2 == 1);
    LadSolution sol;
    try {
      sol = solve_lad(p);
    } catch (const RankDeficientError&) {
      continue;  // weighted support lost rank
    }
    REQUIRE(sol.status == LadStatus::optimal);
    CHECK(std::abs(objective(p, sol.beta) - sol.objective) <= 1e-9 * std::max(1.0, sol.objective));
    CHECK(sol.basis.size() == d);

    for (int k = 0; k < 100; ++k) {
      Vector ref = sol.beta;
      const double step = std::pow(10.0, -4.0 + 4.0 * rng.uniform());
      for (auto& b : ref) b += step * rng.normal();
      CHECK(sol.objective <= objective(p, ref) + 1e-8 * sol.objective);
    }

    double wsum = 0.0;
    for (std::size_t i = 0; i < m; ++i) wsum += p.weight(i);
    const double amax = p.a.max_abs_entry();
    CHECK(stationarity(p, sol) <= 1e-8 * wsum * amax);
    const Vector r = [&] {
      Vector out = matvec(p.a, sol.beta);
      for (std::size_t i = 0; i < m; ++i) out[i] -= p.b[i];
      return out;
    }();
    for (std::size_t i = 0; i < m; ++i) {
      CHECK(std::abs(sol.certificate[i]) <= 1.0 + 1e-12);
      if (p.weight(i) > 0.0 && std::abs(r[i]) > 1e-9 * (1.0 + std::abs(p.b[i])))
        CHECK(sol.certificate[i] == (r[i] > 0 ? 1.0 : -1.0));
    }
  }
}

TEST_CASE("translation equivariance") {
  RngStream rng(205);
  for (int rep = 0; rep < 20; ++rep) {
    const LadProblem p = random_problem(60, 3, rng, false);
    const Vector c = gaussian_vector(3, rng);
    LadProblem shifted = p;
    const Vector ac = matvec(p.a, c);
    for (std::size_t i = 0; i < p.b.size(); ++i) shifted.b[i] += ac[i];
    const LadSolution a = solve_lad(p);
    const LadSolution b = solve_lad(shifted);
    CHECK(std::abs(a.objective - b.objective) <= 1e-8 * std::max(1.0, a.objective));
    // The minimizer of a generic problem is a unique vertex.
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(b.beta[j] - (a.beta[j] + c[j])) <= 1e-8);
  }
}

TEST_CASE("duplicates, zero weights and outliers") {
  // Duplicated rows behave like one row with summed weight.
  const LadSolution dup = solve_lad(LadProblem{Matrix(4, 1, 1.0), {0, 0, 5, 7}, {}});
  CHECK(dup.beta[0] >= 0.0);
  CHECK(dup.beta[0] <= 5.0);
  CHECK(dup.objective == doctest::Approx(12.0));

  const LadSolution zw =
      solve_lad(LadProblem{Matrix{{1, 0}, {0, 1}, {1, 1}}, {1, 1, 1000}, {1, 1, 0}});
  CHECK(zw.objective == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(zw.certificate[2] == 0.0);

  // A huge outlier on one row does not move a well-determined fit.
  RngStream rng(206);
  LadProblem p{gaussian_matrix(200, 4, rng), Vector(200), {}};
  const Vector beta_true{1, -2, 3, 0.5};
  p.b = matvec(p.a, beta_true);
  p.b[17] += 1e9;
  const LadSolution sol = solve_lad(p);
  for (std::size_t j = 0; j < 4; ++j) CHECK(sol.beta[j] == doctest::Approx(beta_true[j]).epsilon(1e-8));
}

TEST_CASE("solver errors") {
  CHECK_THROWS_AS(solve_lad(LadProblem{Matrix{{1, 2}, {2, 4}}, {1, 2}, {}}), RankDeficientError);
  CHECK_THROWS_AS(solve_lad(LadProblem{Matrix{{1, 0}, {0, 1}}, {1, 2}, {1, 0}}), RankDeficientError);
  CHECK_THROWS_AS(solve_lad(LadProblem{Matrix{{1, 0}}, {1, 2}, {}}), DimensionError);
  CHECK_THROWS_AS(solve_lad(LadProblem{Matrix{{1}}, {1}, {-1}}), InvalidArgument);
  CHECK_THROWS_AS(solve_lad(LadProblem{Matrix{{1}}, {1}, {}}, 0.0), InvalidArgument);
}
