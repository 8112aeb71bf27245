#pragma once

// Sampling-and-reweighting sketches. A sketch with budget N is N independent
// draws; draw k picks row i with probability p_i / N and carries the scale
// 1 / p_i, so that E ||S v||_1 = ||v||_1 whenever sum_i p_i = N. The sketch
// is stored as (index, scale) pairs, never as a dense N x n matrix.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "activelad/linalg.hpp"
#include "activelad/rng.hpp"

namespace activelad {

struct Draw {
  std::size_t index = 0;
  double scale = 0.0;

  friend bool operator==(const Draw&, const Draw&) = default;
};

struct Sketch {
  std::size_t source_n = 0;
  std::vector<Draw> draws;  // one entry per sketch row; size() is the budget N
  // Seed record of the stream the draws came from.
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::uint64_t substream = 0;

  std::size_t budget() const noexcept { return draws.size(); }
  /// Distinct sampled row indices, ascending.
  std::vector<std::size_t> distinct_indices() const;

  /// The n-row sketch with draws (k, 1) for k = 0..n-1, i.e. S = I.
  static Sketch identity(std::size_t n);

  friend bool operator==(const Sketch&, const Sketch&) = default;
};

/// Walker/Vose alias table over the positive entries of a weight vector.
/// Zero-weight entries are not in the table at all, so they are never drawn.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights);

  std::size_t sample(RngStream& rng) const noexcept;
  std::size_t size() const noexcept { return support_.size(); }

 private:
  std::vector<std::size_t> support_;  // original indices with positive weight
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;    // positions into support_
};

/// N independent categorical draws with P(i) = p_i / N. Requires
/// sum p_i = N within 1e-6 relative and at least one positive p_i.
Sketch draw_sketch(const WeightVector& p, std::size_t budget, RngStream rng);

/// Row k of the result is scale_k times row i_k of m.
Matrix apply_to_columns(const Sketch& s, const Matrix& m);
Vector apply_to_columns(const Sketch& s, std::span<const double> v);

/// ||S v||_1 without materializing S v.
double sketched_l1_norm(const Sketch& s, std::span<const double> v);

/// Largest |‖SXβ‖₁ / ‖Xβ‖₁ − 1| over `probes` Gaussian directions β. This is an
/// observed lower bound on the true distortion over the column space, not a
/// certificate.
double embedding_distortion(const Sketch& s, const Matrix& x, std::size_t probes,
                            RngStream rng);

}  // namespace activelad
