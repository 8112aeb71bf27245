#include "activelad/instances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "activelad/error.hpp"
#include "activelad/l1solve.hpp"

namespace activelad {

const char* to_string(Family f) noexcept {
  switch (f) {
    case Family::biased_hypercube:
      return "biased_hypercube";
    case Family::two_coin:
      return "two_coin";
    case Family::hidden_coordinate:
      return "hidden_coordinate";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  if (name == "biased_hypercube") return Family::biased_hypercube;
  if (name == "two_coin") return Family::two_coin;
  if (name == "hidden_coordinate") return Family::hidden_coordinate;
  throw InvalidArgument("unknown instance family '" + name + "'");
}

DistributionalInstance DistributionalInstance::biased_hypercube(Vector codeword, double bias) {
  if (codeword.empty()) throw InvalidArgument("biased_hypercube: empty codeword");
  for (double c : codeword)
    if (c != 1.0 && c != -1.0) throw InvalidArgument("biased_hypercube: codeword not +-1");
  if (!(bias >= 0.0 && bias <= 0.5)) throw InvalidArgument("bias must lie in [0, 1/2]");
  return {Family::biased_hypercube, bias, std::move(codeword)};
}

DistributionalInstance DistributionalInstance::two_coin(std::size_t d, double bias,
                                                        bool positive) {
  auto inst = biased_hypercube(Vector(d, positive ? 1.0 : -1.0), bias);
  inst.family = Family::two_coin;
  return inst;
}

DistributionalInstance DistributionalInstance::hidden_coordinate(std::size_t d,
                                                                 std::size_t hidden,
                                                                 double bias) {
  if (hidden >= d) throw InvalidArgument("hidden_coordinate: index out of range");
  if (!(bias >= 0.0 && bias <= 0.5)) throw InvalidArgument("bias must lie in [0, 1/2]");
  Vector beta(d, 0.0);
  beta[hidden] = 1.0;
  return {Family::hidden_coordinate, bias, std::move(beta)};
}

double expected_loss(const DistributionalInstance& inst, std::span<const double> beta) {
  const std::size_t d = inst.dim();
  if (beta.size() != d) throw DimensionError("expected_loss: beta length mismatch");
  const double up = 0.5 + inst.bias;
  const double down = 0.5 - inst.bias;
  CompensatedSum acc;
  for (std::size_t i = 0; i < d; ++i) {
    const double t = inst.beta_star[i];
    if (inst.family == Family::hidden_coordinate) {
      // y = t with probability up, 0 otherwise.
      acc.add(up * std::abs(beta[i] - t) + down * std::abs(beta[i]));
    } else {
      // y = t with probability up, -t otherwise.
      acc.add(up * std::abs(beta[i] - t) + down * std::abs(beta[i] + t));
    }
  }
  return acc.value() / static_cast<double>(d);
}

double sample_label(const DistributionalInstance& inst, std::size_t i, RngStream& rng) {
  const bool z_one = rng.bernoulli(inst.prob_z_one());
  const double t = inst.beta_star[i];
  if (inst.family == Family::hidden_coordinate) return z_one ? t : 0.0;
  return z_one ? t : -t;
}

LabeledData sample_pairs(const DistributionalInstance& inst, std::size_t m, RngStream& rng) {
  if (m == 0) throw InvalidArgument("sample_pairs: m must be positive");
  const std::size_t d = inst.dim();
  LabeledData out{Matrix(m, d), Vector(m)};
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = rng.uniform_index(d);
    out.x(k, i) = 1.0;
    out.y[k] = sample_label(inst, i, rng);
  }
  return out;
}

std::size_t reduction_rows(std::size_t d, double eps, double delta,
                           ReductionConstants constants) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("reduction_rows: eps not in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("reduction_rows: delta not in (0,1)");
  const double dd = static_cast<double>(d);
  const bool proof = constants == ReductionConstants::proof;
  const double lead = (proof ? 8.0 : 2.0) / (eps * eps);
  const double cover = (proof ? 4.0 : 3.0) * dd / eps;
  return static_cast<std::size_t>(
      std::ceil(lead * (std::log(2.0 / delta) + dd * std::log(cover))));
}

LabeledData reduce_to_matrix(const DistributionalInstance& inst, double eps, double delta,
                             RngStream& rng, ReductionConstants constants) {
  return sample_pairs(inst, reduction_rows(inst.dim(), eps, delta, constants), rng);
}

double Codebook::target_size() const { return std::pow(2.0, 0.2 * static_cast<double>(d)); }

double Codebook::min_distance() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < words.size(); ++a)
    for (std::size_t b = a + 1; b < words.size(); ++b) {
      double dist = 0.0;
      for (std::size_t i = 0; i < d; ++i) dist += std::abs(words[a][i] - words[b][i]);
      best = std::min(best, dist);
    }
  return best;
}

bool Codebook::valid() const {
  for (const auto& w : words) {
    if (w.size() != d) return false;
    for (double v : w)
      if (v != 1.0 && v != -1.0) return false;
  }
  return words.size() < 2 || min_distance() > 0.2 * static_cast<double>(d);
}

Codebook build_codebook(std::size_t d, RngStream& rng, std::size_t max_attempts) {
  if (d < 2) throw InvalidArgument("build_codebook: d must be at least 2");
  Codebook book;
  book.d = d;
  book.words.push_back(Vector(d, 1.0));
  book.words.push_back(Vector(d, -1.0));
  const double min_dist = 0.2 * static_cast<double>(d);
  const auto target = static_cast<std::size_t>(std::ceil(book.target_size()));

  Vector candidate(d);
  std::size_t rejected = 0;
  while (book.words.size() < target && rejected < max_attempts) {
    for (auto& c : candidate) c = rng.bernoulli(0.5) ? 1.0 : -1.0;
    const bool far = std::all_of(book.words.begin(), book.words.end(), [&](const Vector& w) {
      double dist = 0.0;
      for (std::size_t i = 0; i < d; ++i) dist += std::abs(w[i] - candidate[i]);
      return dist > min_dist;
    });
    if (far) {
      book.words.push_back(candidate);
    } else {
      ++rejected;
    }
  }
  return book;
}

OutlierInstance make_outlier_instance(std::size_t n, std::size_t d, double outlier_magnitude,
                                      RngStream& rng, const OutlierOptions& opts) {
  if (d == 0 || n < d) throw InvalidArgument("make_outlier_instance: need n >= d >= 1");
  if (opts.num_outliers > n) throw InvalidArgument("make_outlier_instance: too many outliers");
  if (opts.isolated_direction && d < 2) {
    throw InvalidArgument("make_outlier_instance: isolated direction needs d >= 2");
  }

  OutlierInstance inst;
  inst.x = Matrix(n, d);
  if (opts.isolated_direction) {
    inst.isolated_row = rng.uniform_index(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == inst.isolated_row) {
        inst.x(i, d - 1) = opts.isolated_scale;
      } else {
        for (std::size_t j = 0; j + 1 < d; ++j) inst.x(i, j) = rng.normal();
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) inst.x(i, j) = rng.normal();
  }

  inst.beta_star.resize(d);
  for (auto& b : inst.beta_star) b = rng.normal();
  inst.y = matvec(inst.x, inst.beta_star);
  for (auto& y : inst.y) y += opts.noise_scale * rng.normal();

  // Distinct outlier rows by partial Fisher-Yates.
  std::vector<std::size_t> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = i;
  for (std::size_t k = 0; k < opts.num_outliers; ++k) {
    const std::size_t j = k + rng.uniform_index(n - k);
    std::swap(rows[k], rows[j]);
    inst.outlier_rows.push_back(rows[k]);
    inst.y[rows[k]] += outlier_magnitude;
  }
  std::sort(inst.outlier_rows.begin(), inst.outlier_rows.end());

  const LadSolution full = solve_lad({inst.x, inst.y, {}});
  inst.opt = full.objective;
  inst.beta_opt = full.beta;
  return inst;
}

}  // namespace activelad
