#include <doctest.h>

#include <cmath>

#include "activelad/error.hpp"
#include "activelad/linalg.hpp"
#include "test_support.hpp"

using namespace activelad;
using activelad::testing::gaussian_matrix;
using activelad::testing::gaussian_vector;
using activelad::testing::random_spd;

TEST_CASE("gram_weighted on identity and scaled weights") {
  const Matrix i2 = Matrix::identity(2);
  CHECK(gram_weighted(i2, Vector{1, 1}) == i2);
  const Matrix g = gram_weighted(i2, Vector{0.5, 0.5});
  CHECK(g == Matrix{{2, 0}, {0, 2}});
}

TEST_CASE("gram_weighted with unit weights matches a triple loop") {
  RngStream rng(11);
  const Matrix x = gaussian_matrix(5, 2, rng);
  const Matrix g = gram_weighted(x, Vector(5, 1.0));
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < 5; ++i) s += x(i, a) * x(i, b);
      CHECK(g(a, b) == doctest::Approx(s).epsilon(1e-14));
    }
}

TEST_CASE("gram_weighted is exactly symmetric and rejects bad weights") {
  RngStream rng(12);
  const Matrix x = gaussian_matrix(40, 6, rng);
  Vector w(40);
  for (auto& v : w) v = std::exp(4.0 * rng.normal());
  const Matrix g = gram_weighted(x, w);
  for (std::size_t a = 0; a < 6; ++a)
    for (std::size_t b = 0; b < 6; ++b) CHECK(g(a, b) == g(b, a));

  CHECK_THROWS_AS(gram_weighted(x, Vector(39, 1.0)), DimensionError);
  w[3] = 0.0;
  CHECK_THROWS_AS(gram_weighted(x, w), InvalidArgument);

  // A zero weight on an all-zero row is allowed and the row is skipped.
  Matrix xz = x;
  for (auto& v : xz.row(3)) v = 0.0;
  CHECK_NOTHROW(gram_weighted(xz, w));
}

TEST_CASE("spd_solve examples") {
  const SpdFactorization eye(Matrix::identity(2));
  const Vector z = eye.solve(Vector{3, -5});
  CHECK(z[0] == 3.0);
  CHECK(z[1] == -5.0);

  const SpdFactorization diag(Matrix{{2, 0}, {0, 4}});
  const Vector one = diag.solve(Vector{2, 4});
  CHECK(one[0] == doctest::Approx(1.0));
  CHECK(one[1] == doctest::Approx(1.0));

  CHECK_THROWS_AS(diag.solve(Vector{1, 2, 3}), DimensionError);
}

TEST_CASE("spd_solve residual on random SPD systems") {
  RngStream rng(21);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 1 + rng.uniform_index(8);
    const Matrix a = random_spd(d, rng);
    const Vector b = gaussian_vector(d, rng);
    const SpdFactorization f(a);
    const Vector z = f.solve(b);
    const Vector az = matvec(a, z);
    double worst = 0.0;
    for (std::size_t i = 0; i < d; ++i) worst = std::max(worst, std::abs(az[i] - b[i]));
    CHECK(worst <= 1e-8 * std::max(1.0, max_abs(b)));
  }
}

TEST_CASE("spd factorization reconstructs its input") {
  RngStream rng(22);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = random_spd(6, rng);
    const Matrix back = SpdFactorization(a).reconstruct();
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j)
        CHECK(std::abs(back(i, j) - a(i, j)) <= 1e-10 * a.max_abs_entry());
  }
}

TEST_CASE("spd factorization refuses rank-deficient matrices") {
  CHECK_THROWS_AS(SpdFactorization(Matrix{{1, 1}, {1, 1}}), RankDeficientError);
  CHECK_THROWS_AS(SpdFactorization(Matrix(3, 3, 0.0)), RankDeficientError);
  // Pivot just below 1e-12 * max diagonal.
  CHECK_THROWS_AS(SpdFactorization(Matrix{{1, 0}, {0, 1e-13}}), RankDeficientError);
  CHECK_NOTHROW(SpdFactorization(Matrix{{1, 0}, {0, 1e-11}}));
}

TEST_CASE("spd solve stays accurate up to condition number 1e8") {
  RngStream rng(23);
  // Q diag(1 .. 1e-8) Q^T from a random orthogonal Q (Gram-Schmidt).
  const std::size_t d = 5;
  Matrix q = gaussian_matrix(d, d, rng);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double c = 0.0;
      for (std::size_t i = 0; i < d; ++i) c += q(i, j) * q(i, k);
      for (std::size_t i = 0; i < d; ++i) q(i, j) -= c * q(i, k);
    }
    double n = 0.0;
    for (std::size_t i = 0; i < d; ++i) n += q(i, j) * q(i, j);
    for (std::size_t i = 0; i < d; ++i) q(i, j) /= std::sqrt(n);
  }
  Matrix a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k)
        a(i, j) += q(i, k) * std::pow(10.0, -2.0 * static_cast<double>(k)) * q(j, k);
  const Vector b = gaussian_vector(d, rng);
  const Vector z = SpdFactorization(a).solve(b);
  const Vector az = matvec(a, z);
  for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(az[i] - b[i]) <= 1e-8 * max_abs(b));
}

TEST_CASE("quadratic_form examples") {
  CHECK(SpdFactorization(Matrix::identity(2)).quadratic_form(Vector{1, 0}) == 1.0);
  CHECK(SpdFactorization(Matrix{{4, 0}, {0, 1}}).quadratic_form(Vector{2, 0}) ==
        doctest::Approx(1.0));
  CHECK_THROWS_AS(SpdFactorization(Matrix::identity(2)).quadratic_form(Vector{1}),
                  DimensionError);
}

TEST_CASE("quadratic_form matches an explicit Gauss-Jordan inverse and is nonnegative") {
  RngStream rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 1 + rng.uniform_index(7);
    const Matrix a = random_spd(d, rng);
    const Vector v = gaussian_vector(d, rng);
    const double got = SpdFactorization(a).quadratic_form(v);
    CHECK(got >= 0.0);
    CHECK(got == doctest::Approx(testing::explicit_quadratic_form(a, v)).epsilon(1e-9));
  }
}

TEST_CASE("leverage score examples") {
  const WeightVector l3 = leverage_scores(Matrix::identity(3));
  CHECK(l3.kind == WeightKind::leverage);
  for (double v : l3.values) CHECK(v == doctest::Approx(1.0));

  const WeightVector dup = leverage_scores(Matrix{{1}, {1}});
  CHECK(dup[0] == doctest::Approx(0.5));
  CHECK(dup[1] == doctest::Approx(0.5));

  CHECK_THROWS_AS(leverage_scores(Matrix{{1, 2}, {2, 4}, {3, 6}}), RankDeficientError);
}

TEST_CASE("leverage scores lie in [0,1] and sum to d") {
  RngStream rng(41);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t d = 1 + rng.uniform_index(6);
    const std::size_t n = d + rng.uniform_index(40);
    const Matrix x = gaussian_matrix(n, d, rng);
    const WeightVector l = leverage_scores(x);
    for (double v : l.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0 + 1e-12);
    }
    CHECK(std::abs(l.sum() - static_cast<double>(d)) <= 1e-6);
  }
}

TEST_CASE("lu factorization solves and transposed-solves") {
  RngStream rng(51);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t d = 1 + rng.uniform_index(6);
    const Matrix a = gaussian_matrix(d, d, rng);
    const Vector b = gaussian_vector(d, rng);
    const LuFactorization lu(a);
    const Vector z = lu.solve(b);
    const Vector zt = lu.solve_transpose(b);
    const Vector az = matvec(a, z);
    const Vector atz = matvec_transpose(a, zt);
    for (std::size_t i = 0; i < d; ++i) {
      CHECK(az[i] == doctest::Approx(b[i]).epsilon(1e-8));
      CHECK(atz[i] == doctest::Approx(b[i]).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(LuFactorization(Matrix{{1, 2}, {2, 4}}), RankDeficientError);
}

TEST_CASE("compensated sum recovers cancelled low-order terms") {
  const Vector xs{1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(xs) == 2.0);
  CHECK(l1_norm(Vector{-1, 2, -3}) == 6.0);
}

TEST_CASE("matrix helpers") {
  const Matrix x{{1, 2}, {3, 4}};
  CHECK(x.transpose() == Matrix{{1, 3}, {2, 4}});
  CHECK(x.vstack(Matrix{{5, 6}}) == Matrix{{1, 2}, {3, 4}, {5, 6}});
  CHECK(x.hstack(Vector{7, 8}) == Matrix{{1, 2, 7}, {3, 4, 8}});
  const std::vector<std::size_t> pick{1};
  CHECK(x.select_rows(pick) == Matrix{{3, 4}});
  CHECK_THROWS_AS(x.vstack(Matrix{{1, 2, 3}}), DimensionError);
  Matrix bad = x;
  bad(0, 0) = NAN;
  CHECK_THROWS_AS(bad.require_finite(), InvalidArgument);
}
