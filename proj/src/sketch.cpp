#include "activelad/sketch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "activelad/error.hpp"

namespace activelad {

std::vector<std::size_t> Sketch::distinct_indices() const {
  std::vector<std::size_t> idx;
  idx.reserve(draws.size());
  for (const auto& d : draws) idx.push_back(d.index);
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

Sketch Sketch::identity(std::size_t n) {
  Sketch s;
  s.source_n = n;
  s.draws.reserve(n);
  for (std::size_t k = 0; k < n; ++k) s.draws.push_back({k, 1.0});
  return s;
}

AliasTable::AliasTable(std::span<const double> weights) {
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0 || !std::isfinite(weights[i])) {
      throw InvalidArgument("AliasTable: weights must be finite and nonnegative");
    }
    if (weights[i] > 0.0) {
      support_.push_back(i);
      total += weights[i];
    }
  }
  if (support_.empty()) throw InvalidArgument("AliasTable: all weights are zero");

  const std::size_t k = support_.size();
  prob_.assign(k, 1.0);
  alias_.resize(k);
  for (std::size_t j = 0; j < k; ++j) alias_[j] = j;

  std::vector<double> scaled(k);
  std::vector<std::size_t> small, large;
  for (std::size_t j = 0; j < k; ++j) {
    scaled[j] = weights[support_[j]] * static_cast<double>(k) / total;
    (scaled[j] < 1.0 ? small : large).push_back(j);
  }
  while (!small.empty() && !large.empty()) {
    const std::size_t s = small.back();
    small.pop_back();
    const std::size_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to roundoff.
  for (std::size_t j : small) prob_[j] = 1.0;
  for (std::size_t j : large) prob_[j] = 1.0;
}

std::size_t AliasTable::sample(RngStream& rng) const noexcept {
  const std::size_t column = rng.uniform_index(prob_.size());
  const double u = rng.uniform();
  return support_[u < prob_[column] ? column : alias_[column]];
}

Sketch draw_sketch(const WeightVector& p, std::size_t budget, RngStream rng) {
  if (budget == 0) throw InvalidArgument("draw_sketch: budget must be positive");
  if (p.size() == 0) throw DimensionError("draw_sketch: empty sampling vector");
  const double total = p.sum();
  const double n_budget = static_cast<double>(budget);
  if (!(total > 0.0)) throw InvalidArgument("draw_sketch: all sampling values are zero");
  if (std::abs(total - n_budget) > 1e-6 * n_budget) {
    throw InvalidArgument("draw_sketch: sampling values sum to " + std::to_string(total) +
                          ", expected budget " + std::to_string(budget));
  }

  const AliasTable table(p.values);
  Sketch s;
  s.source_n = p.size();
  s.seed = rng.seed();
  s.stream = rng.stream();
  s.substream = rng.substream();
  s.draws.reserve(budget);
  for (std::size_t k = 0; k < budget; ++k) {
    const std::size_t i = table.sample(rng);
    s.draws.push_back({i, 1.0 / p[i]});
  }
  return s;
}

Matrix apply_to_columns(const Sketch& s, const Matrix& m) {
  if (m.rows() != s.source_n) {
    throw DimensionError("apply_to_columns: matrix has " + std::to_string(m.rows()) +
                         " rows, sketch expects " + std::to_string(s.source_n));
  }
  Matrix out(s.budget(), m.cols());
  for (std::size_t k = 0; k < s.budget(); ++k) {
    const auto src = m.row(s.draws[k].index);
    auto dst = out.row(k);
    for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = s.draws[k].scale * src[j];
  }
  return out;
}

Vector apply_to_columns(const Sketch& s, std::span<const double> v) {
  if (v.size() != s.source_n) throw DimensionError("apply_to_columns: vector length mismatch");
  Vector out(s.budget());
  for (std::size_t k = 0; k < s.budget(); ++k) out[k] = s.draws[k].scale * v[s.draws[k].index];
  return out;
}

double sketched_l1_norm(const Sketch& s, std::span<const double> v) {
  if (v.size() != s.source_n) throw DimensionError("sketched_l1_norm: vector length mismatch");
  CompensatedSum acc;
  for (const auto& d : s.draws) acc.add(d.scale * std::abs(v[d.index]));
  return acc.value();
}

double embedding_distortion(const Sketch& s, const Matrix& x, std::size_t probes,
                            RngStream rng) {
  if (probes == 0) throw InvalidArgument("embedding_distortion: probes must be positive");
  const Matrix sx = apply_to_columns(s, x);
  Vector beta(x.cols());
  double worst = 0.0;
  for (std::size_t t = 0; t < probes; ++t) {
    for (auto& b : beta) b = rng.normal();
    const double full = l1_norm(matvec(x, beta));
    if (!(full > 0.0)) continue;
    const double sketched = l1_norm(matvec(sx, beta));
    worst = std::max(worst, std::abs(sketched / full - 1.0));
  }
  return worst;
}

}  // namespace activelad
