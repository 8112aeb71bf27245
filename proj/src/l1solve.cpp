#include "activelad/l1solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "activelad/error.hpp"

namespace activelad {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Positively weighted rows with exact duplicates merged.
struct Reduced {
  Matrix a;
  Vector b;
  Vector w;
  std::vector<std::size_t> origin;  // first original row of each group
  std::vector<std::size_t> group;   // original row -> reduced row, npos if dropped
};

constexpr std::size_t npos = static_cast<std::size_t>(-1);

Reduced reduce(const LadProblem& prob) {
  const std::size_t m = prob.a.rows();
  const std::size_t d = prob.a.cols();
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < m; ++i)
    if (prob.weight(i) > 0.0) live.push_back(i);

  auto less = [&](std::size_t i, std::size_t j) {
    const auto ri = prob.a.row(i);
    const auto rj = prob.a.row(j);
    for (std::size_t c = 0; c < d; ++c)
      if (ri[c] != rj[c]) return ri[c] < rj[c];
    if (prob.b[i] != prob.b[j]) return prob.b[i] < prob.b[j];
    return i < j;
  };
  auto same = [&](std::size_t i, std::size_t j) {
    return std::equal(prob.a.row(i).begin(), prob.a.row(i).end(), prob.a.row(j).begin()) &&
           prob.b[i] == prob.b[j];
  };
  std::vector<std::size_t> sorted = live;
  std::sort(sorted.begin(), sorted.end(), less);

  Reduced r;
  r.group.assign(m, npos);
  std::vector<std::size_t> leaders;
  std::vector<CompensatedSum> mass;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const std::size_t i = sorted[k];
    if (k == 0 || !same(sorted[k - 1], i)) {
      leaders.push_back(i);
      mass.emplace_back();
    }
    mass.back().add(prob.weight(i));
    r.group[i] = leaders.size() - 1;
  }
  // Keep groups in order of their first original row so results do not depend
  // on the lexicographic sort.
  std::vector<std::size_t> first(leaders.size(), npos);
  for (std::size_t i = 0; i < m; ++i)
    if (r.group[i] != npos && first[r.group[i]] == npos) first[r.group[i]] = i;
  std::vector<std::size_t> order(leaders.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return first[x] < first[y]; });
  std::vector<std::size_t> rank(leaders.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;

  r.origin.resize(order.size());
  r.b.resize(order.size());
  r.w.resize(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    r.origin[k] = first[order[k]];
    r.b[k] = prob.b[r.origin[k]];
    r.w[k] = mass[order[k]].value();
  }
  r.a = prob.a.select_rows(r.origin);
  for (auto& g : r.group)
    if (g != npos) g = rank[g];
  return r;
}

double reduced_objective(const Reduced& p, std::span<const double> residual) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < residual.size(); ++i) acc.add(p.w[i] * std::abs(residual[i]));
  return acc.value();
}

Vector residuals(const Matrix& a, std::span<const double> b, std::span<const double> beta) {
  Vector r = matvec(a, beta);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

// Index into `values` of the weighted median (left endpoint on ties), with a
// relative slack of 1e-12 on the half-mass comparison.
std::size_t weighted_median_index(std::span<const double> values,
                                  std::span<const double> weights) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return values[i] < values[j] || (values[i] == values[j] && i < j);
  });
  const double total = compensated_sum(weights);
  const double half = 0.5 * total - 1e-12 * total;
  CompensatedSum cum;
  for (std::size_t i : order) {
    cum.add(weights[i]);
    if (cum.value() >= half) return i;
  }
  return order.back();
}

// Least squares start, then IRLS on sum w_i sqrt(r_i^2 + mu^2) with mu shrinking
// geometrically from 1e-2 to 1e-12 times the mean absolute residual.
Vector irls_warm_start(const Reduced& p) {
  const std::size_t m = p.a.rows();
  auto weighted_ls = [&](std::span<const double> omega) {
    const SpdFactorization f(gram_scaled(p.a, omega));
    Vector wb(m);
    for (std::size_t i = 0; i < m; ++i) wb[i] = omega[i] * p.b[i];
    return f.solve(matvec_transpose(p.a, wb));
  };

  Vector beta = weighted_ls(p.w);  // rank errors propagate from here
  Vector r = residuals(p.a, p.b, beta);
  double best_f = reduced_objective(p, r);
  Vector best = beta;
  const double scale = best_f / compensated_sum(p.w);
  if (!(scale > 0.0)) return best;

  Vector omega(m);
  for (double mu = 1e-2 * scale; mu >= 1e-12 * scale; mu *= 0.1) {
    for (int inner = 0; inner < 3; ++inner) {
      for (std::size_t i = 0; i < m; ++i) omega[i] = p.w[i] / std::hypot(r[i], mu);
      try {
        beta = weighted_ls(omega);
      } catch (const RankDeficientError&) {
        return best;
      }
      r = residuals(p.a, p.b, beta);
      const double f = reduced_objective(p, r);
      if (f < best_f) {
        best_f = f;
        best = beta;
      }
    }
  }
  return best;
}

// Greedy choice of d linearly independent rows, smallest |residual| first.
std::vector<std::size_t> initial_basis(const Reduced& p, std::span<const double> r) {
  const std::size_t m = p.a.rows();
  const std::size_t d = p.a.cols();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return std::abs(r[i]) < std::abs(r[j]); });

  std::vector<Vector> q;
  std::vector<std::size_t> basis;
  for (std::size_t i : order) {
    const auto row = p.a.row(i);
    Vector v(row.begin(), row.end());
    const double norm0 = std::sqrt(dot(v, v));
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& qk : q) {
        const double c = dot(qk, v);
        for (std::size_t j = 0; j < d; ++j) v[j] -= c * qk[j];
      }
    const double norm = std::sqrt(dot(v, v));
    if (norm <= 1e-9 * norm0) continue;
    for (auto& x : v) x /= norm;
    q.push_back(std::move(v));
    basis.push_back(i);
    if (basis.size() == d) break;
  }
  if (basis.size() < d) {
    throw RankDeficientError("solve_lad: positively weighted rows span only " +
                             std::to_string(basis.size()) + " of " + std::to_string(d) +
                             " dimensions");
  }
  return basis;
}

}  // namespace

void LadProblem::validate() const {
  if (a.rows() == 0 || a.cols() == 0) throw DimensionError("LadProblem: empty design");
  if (b.size() != a.rows()) throw DimensionError("LadProblem: label length mismatch");
  if (!weights.empty() && weights.size() != a.rows()) {
    throw DimensionError("LadProblem: weight length mismatch");
  }
  a.require_finite();
  for (double v : b)
    if (!std::isfinite(v)) throw InvalidArgument("LadProblem: non-finite label");
  for (double v : weights)
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw InvalidArgument("LadProblem: weights must be finite and nonnegative");
    }
}

const char* to_string(LadStatus status) noexcept {
  switch (status) {
    case LadStatus::optimal:
      return "optimal";
    case LadStatus::max_iter:
      return "max_iter";
    case LadStatus::degenerate:
      return "degenerate";
  }
  return "unknown";
}

double objective(const LadProblem& prob, std::span<const double> beta) {
  if (beta.size() != prob.a.cols()) throw DimensionError("objective: beta length mismatch");
  if (prob.b.size() != prob.a.rows()) throw DimensionError("objective: label length mismatch");
  CompensatedSum acc;
  for (std::size_t i = 0; i < prob.a.rows(); ++i) {
    const double w = prob.weight(i);
    if (w == 0.0) continue;
    acc.add(w * std::abs(dot(prob.a.row(i), beta) - prob.b[i]));
  }
  return acc.value();
}

double weighted_median_1d(std::span<const double> values, std::span<const double> weights) {
  if (values.empty()) throw InvalidArgument("weighted_median_1d: empty input");
  if (values.size() != weights.size()) throw DimensionError("weighted_median_1d: length mismatch");
  for (double w : weights)
    if (!(w >= 0.0)) throw InvalidArgument("weighted_median_1d: negative weight");
  if (!(compensated_sum(weights) > 0.0)) {
    throw InvalidArgument("weighted_median_1d: weights sum to zero");
  }
  return values[weighted_median_index(values, weights)];
}

LadSolution solve_lad(const LadProblem& prob, double tol, int max_iters) {
  prob.validate();
  if (!(tol > 0.0)) throw InvalidArgument("solve_lad: tol must be positive");
  if (max_iters < 1) throw InvalidArgument("solve_lad: max_iters must be at least 1");

  const Reduced p = reduce(prob);
  const std::size_t m = p.a.rows();
  const std::size_t d = p.a.cols();
  if (m < d) {
    throw RankDeficientError("solve_lad: " + std::to_string(m) +
                             " distinct weighted rows cannot determine " + std::to_string(d) +
                             " coefficients");
  }

  Vector beta = irls_warm_start(p);
  Vector r = residuals(p.a, p.b, beta);
  std::vector<std::size_t> basis = initial_basis(p, r);
  std::vector<char> in_basis(m, 0);
  for (std::size_t i : basis) in_basis[i] = 1;

  LadSolution sol;
  sol.status = LadStatus::max_iter;
  Vector s(m, 0.0);
  Vector best_beta = beta;
  Vector best_s(m, 0.0);
  std::vector<std::size_t> best_basis;
  double best_f = reduced_objective(p, r);
  double best_violation = std::numeric_limits<double>::infinity();
  int stalls = 0;

  int iter = 0;
  for (;; ++iter) {
    const Matrix az = p.a.select_rows(basis);
    Vector bz(d);
    for (std::size_t k = 0; k < d; ++k) bz[k] = p.b[basis[k]];
    std::optional<LuFactorization> lu;
    try {
      lu.emplace(az);
    } catch (const RankDeficientError&) {
      sol.status = LadStatus::degenerate;
      break;
    }
    beta = lu->solve(bz);
    r = residuals(p.a, p.b, beta);
    for (std::size_t k = 0; k < d; ++k) r[basis[k]] = 0.0;

    // Signs off the basis; residuals at rounding level count as zero.
    Vector rhs(d, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (in_basis[i]) continue;
      double scale = std::abs(p.b[i]);
      const auto row = p.a.row(i);
      for (std::size_t j = 0; j < d; ++j) scale += std::abs(row[j] * beta[j]);
      s[i] = std::abs(r[i]) <= 64.0 * kEps * scale ? 0.0 : (r[i] > 0.0 ? 1.0 : -1.0);
      if (s[i] == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) rhs[j] -= p.w[i] * s[i] * row[j];
    }
    const Vector u = lu->solve_transpose(rhs);
    double violation = 0.0;
    std::size_t leave = 0;
    for (std::size_t k = 0; k < d; ++k) {
      s[basis[k]] = u[k] / p.w[basis[k]];
      if (std::abs(s[basis[k]]) - 1.0 > violation) {
        violation = std::abs(s[basis[k]]) - 1.0;
        leave = k;
      }
    }
    const double f = reduced_objective(p, r);
    if (f < best_f || (f == best_f && violation < best_violation)) {
      best_f = f;
      best_violation = violation;
      best_beta = beta;
      best_s = s;
      best_basis = basis;
    }
    if (violation <= tol) {
      sol.status = LadStatus::optimal;
      best_f = f;
      best_violation = violation;
      best_beta = beta;
      best_s = s;
      best_basis = basis;
      break;
    }
    if (iter >= max_iters) break;

    // After repeated zero-length steps fall back to the lowest-index violator.
    if (stalls > static_cast<int>(2 * d)) {
      for (std::size_t k = 0; k < d; ++k) {
        if (std::abs(s[basis[k]]) - 1.0 > tol &&
            (std::abs(s[basis[leave]]) - 1.0 <= tol || basis[k] < basis[leave])) {
          leave = k;
        }
      }
    }

    // Edge leaving the vertex: keep the other basis rows at zero residual and
    // move row `leave` in the direction that decreases the objective.
    const double sigma = s[basis[leave]] > 0.0 ? 1.0 : -1.0;
    Vector e(d, 0.0);
    e[leave] = sigma;
    const Vector dir = lu->solve(e);

    std::vector<std::size_t> cand;
    Vector knots, mass;
    for (std::size_t i = 0; i < m; ++i) {
      if (in_basis[i] && i != basis[leave]) continue;
      const double g = i == basis[leave] ? sigma : dot(p.a.row(i), dir);
      if (g == 0.0) continue;
      cand.push_back(i);
      knots.push_back(i == basis[leave] ? 0.0 : -r[i] / g);
      mass.push_back(p.w[i] * std::abs(g));
    }
    const std::size_t pick = weighted_median_index(knots, mass);
    std::size_t enter = cand[pick];
    if (enter == basis[leave]) {
      for (std::size_t c = 0; c < cand.size(); ++c)
        if (cand[c] != basis[leave] && knots[c] == knots[pick]) {
          enter = cand[c];
          break;
        }
    }
    if (enter == basis[leave]) {
      sol.status = LadStatus::degenerate;
      break;
    }
    stalls = knots[pick] == 0.0 ? stalls + 1 : 0;
    in_basis[basis[leave]] = 0;
    in_basis[enter] = 1;
    basis[leave] = enter;
  }

  sol.iterations = iter;
  sol.beta = best_beta;
  sol.objective = objective(prob, sol.beta);

  if (sol.status == LadStatus::optimal) {
    // Dual value of the clipped certificate; equals the primal at an exact optimum.
    CompensatedSum dual;
    for (std::size_t i = 0; i < m; ++i)
      dual.add(-p.w[i] * std::clamp(best_s[i], -1.0, 1.0) * p.b[i]);
    const double gap = std::abs(sol.objective - dual.value());
    sol.optimality_gap_estimate = sol.objective > 0.0 ? gap / sol.objective : gap;
  } else {
    sol.optimality_gap_estimate = best_violation;
  }

  sol.basis.reserve(d);
  for (std::size_t k : best_basis) sol.basis.push_back(p.origin[k]);
  std::sort(sol.basis.begin(), sol.basis.end());
  sol.certificate.assign(prob.a.rows(), 0.0);
  for (std::size_t i = 0; i < prob.a.rows(); ++i)
    if (p.group[i] != npos) sol.certificate[i] = std::clamp(best_s[p.group[i]], -1.0, 1.0);
  return sol;
}

}  // namespace activelad
