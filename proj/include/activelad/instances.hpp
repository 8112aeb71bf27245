#pragma once

// Problem generators: planted-outlier regression designs, and the
// distributional families used for sample-complexity lower bounds, where x is
// a uniformly random standard basis vector e_i and y = Z x^T beta*.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "activelad/linalg.hpp"
#include "activelad/rng.hpp"

namespace activelad {

enum class Family {
  /// Z = +1 w.p. 1/2 + bias, -1 otherwise; beta* a +-1 codeword.
  biased_hypercube,
  /// biased_hypercube with beta* = +1_d or -1_d.
  two_coin,
  /// Z = 1 w.p. 1/2 + bias (3/4 by default), 0 otherwise; beta* = e_{i*}.
  hidden_coordinate,
};

const char* to_string(Family f) noexcept;
Family parse_family(const std::string& name);

struct DistributionalInstance {
  Family family = Family::biased_hypercube;
  double bias = 0.1;
  Vector beta_star;

  std::size_t dim() const noexcept { return beta_star.size(); }
  double prob_z_one() const noexcept { return 0.5 + bias; }

  static DistributionalInstance biased_hypercube(Vector codeword, double bias);
  static DistributionalInstance two_coin(std::size_t d, double bias, bool positive);
  static DistributionalInstance hidden_coordinate(std::size_t d, std::size_t hidden,
                                                  double bias = 0.25);
};

/// Exact E|x^T beta - Y| under the instance's distribution.
double expected_loss(const DistributionalInstance& inst, std::span<const double> beta);

struct LabeledData {
  Matrix x;
  Vector y;
};

/// m i.i.d. pairs (x, y) with x uniform over the standard basis.
LabeledData sample_pairs(const DistributionalInstance& inst, std::size_t m, RngStream& rng);

/// One label drawn from P(y | x = e_i).
double sample_label(const DistributionalInstance& inst, std::size_t i, RngStream& rng);

enum class ReductionConstants {
  /// n = (2/eps^2)(log(2/delta) + d log(3d/eps))
  statement,
  /// n = (8/eps^2)(log(2/delta) + d log(4d/eps))
  proof,
};

std::size_t reduction_rows(std::size_t d, double eps, double delta,
                           ReductionConstants constants = ReductionConstants::proof);

/// Draws reduction_rows(...) i.i.d. rows and labels from the instance, giving
/// a finite regression problem whose (1+eps) solutions are (1+6 eps)-accurate
/// for the distribution.
LabeledData reduce_to_matrix(const DistributionalInstance& inst, double eps, double delta,
                             RngStream& rng,
                             ReductionConstants constants = ReductionConstants::proof);

/// +-1 vectors with pairwise l1 distance > 0.2 d.
struct Codebook {
  std::size_t d = 0;
  std::vector<Vector> words;

  /// 2^{0.2 d}, the size the greedy construction aims for.
  double target_size() const;
  /// Smallest pairwise l1 distance (infinity for fewer than two words).
  double min_distance() const;
  bool valid() const;
};

/// Greedy rejection sampling seeded with +1_d and -1_d. Stops at the target
/// size or after `max_attempts` rejected candidates; may fall short at small d.
Codebook build_codebook(std::size_t d, RngStream& rng, std::size_t max_attempts = 20000);

struct OutlierOptions {
  double noise_scale = 1.0;
  std::size_t num_outliers = 1;
  /// One row is M e_d and the rest live in the first d-1 coordinates.
  bool isolated_direction = false;
  double isolated_scale = 1.0;
};

struct OutlierInstance {
  Matrix x;
  Vector y;
  Vector beta_star;
  std::vector<std::size_t> outlier_rows;
  std::size_t isolated_row = static_cast<std::size_t>(-1);
  /// Full-data minimum of ||X beta - y||_1 and a minimizer.
  double opt = 0.0;
  Vector beta_opt;
};

/// Gaussian X and beta*, y = X beta* + Gaussian noise + planted outliers of
/// the given magnitude. OPT comes from the full-data LAD solve.
OutlierInstance make_outlier_instance(std::size_t n, std::size_t d, double outlier_magnitude,
                                      RngStream& rng, const OutlierOptions& opts = {});

}  // namespace activelad
