#pragma once

// Queries over a whole test set, and depth-based thinning of the target set.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hullmle/hull.hpp"
#include "hullmle/numerics.hpp"
#include "hullmle/parallel.hpp"

namespace hullmle {

struct ScaleReport {
  double min_scale = kInfinity;
  Vector per_point;
  std::size_t argmin = 0;
  bool any_degenerate = false;
};

/// gamma for every test point (rows of `test`, original coordinates) and the
/// smallest of them. Scaling every centered test point by any factor below
/// min_scale places all of them strictly inside the hull.
inline ScaleReport min_scale(const TargetSet& t, const Matrix& test, const SolverConfig& cfg = {},
                             std::size_t threads = 1) {
  if (test.rows() == 0) throw std::invalid_argument("min_scale: empty test set");
  if (test.cols() != t.dim()) throw std::invalid_argument("min_scale: test points have the wrong dimension");
  if (!t.full_rank())
    throw std::invalid_argument("min_scale: target set is degenerate (rank " + std::to_string(t.rank()) + " < " +
                                std::to_string(t.dim()) + ")");
  ScaleReport rep;
  rep.per_point.assign(test.rows(), kInfinity);
  std::vector<char> degenerate(test.rows(), 0);
  parallel_for(test.rows(), threads, [&](std::size_t j) {
    const HullVerdict v = query(t, test.row(j), cfg);
    if (v.status == HullStatus::Degenerate) degenerate[j] = 1;
    else rep.per_point[j] = v.gamma;
  });
  for (std::size_t j = 0; j < test.rows(); ++j) {
    rep.any_degenerate = rep.any_degenerate || degenerate[j];
    if (rep.per_point[j] < rep.min_scale) {
      rep.min_scale = rep.per_point[j];
      rep.argmin = j;
    }
  }
  return rep;
}

/// Moves every test point along its ray from the target reference point:
/// x -> c + factor (x - c).
inline Matrix rescale_test_points(const TargetSet& t, const Matrix& test, double factor) {
  Matrix out = test;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      out(i, j) = t.centroid()[j] + factor * (test(i, j) - t.centroid()[j]);
  return out;
}

/// Row indices ordered by decreasing squared Mahalanobis distance from the
/// reference point, under the covariance of the full set. Ties keep index
/// order.
inline std::vector<std::size_t> depth_order(const TargetSet& t) {
  if (t.size() < 2) throw std::invalid_argument("depth ordering needs at least two points");
  const MahalanobisMetric metric(covariance(t.points()));
  std::vector<double> dist(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) dist[i] = metric.squared_distance(t.points().row(i));
  std::vector<std::size_t> order(t.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
  return order;
}

inline std::size_t kept_count(double keep_fraction, std::size_t r) {
  if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
    throw std::invalid_argument("keep fraction must lie in (0, 1]");
  // guard against products such as 0.7 * 10 = 7.000000000000001
  const double raw = keep_fraction * static_cast<double>(r);
  const auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
  return std::clamp<std::size_t>(k, 1, r);
}

namespace detail {

inline TargetSet take_rows(const TargetSet& t, const std::vector<std::size_t>& order, std::size_t k) {
  return TargetSet::from_centered(t.points().select_rows(std::span(order.data(), k)), t.centroid());
}

}  // namespace detail

/// Keeps the ceil(f r) points farthest from the reference point in
/// Mahalanobis distance. The reference point is kept, not re-estimated.
inline TargetSet mahalanobis_prune(const TargetSet& t, double keep_fraction) {
  const std::size_t k = kept_count(keep_fraction, t.size());
  return detail::take_rows(t, depth_order(t), k);
}

struct PrunePoint {
  double fraction;
  std::size_t kept;
  double min_scale;
  bool any_degenerate;
};

/// min_scale against the pruned target set for each kept fraction. One depth
/// ordering is shared, so the kept sets are nested.
inline std::vector<PrunePoint> prune_curve(const TargetSet& t, const Matrix& test, std::span<const double> fractions,
                                           const SolverConfig& cfg = {}, std::size_t threads = 1) {
  const std::vector<std::size_t> order = depth_order(t);
  std::vector<PrunePoint> out;
  out.reserve(fractions.size());
  for (double f : fractions) {
    const std::size_t k = kept_count(f, t.size());
    const TargetSet pruned = detail::take_rows(t, order, k);
    if (!pruned.full_rank()) {
      out.push_back({f, k, kInfinity, true});
      continue;
    }
    const ScaleReport rep = min_scale(pruned, test, cfg, threads);
    out.push_back({f, k, rep.min_scale, rep.any_degenerate});
  }
  return out;
}

/// Whether Var(T) - Var(S) is positive definite. Together with every test
/// point being interior, this makes the sampled log-likelihood ratio have a
/// unique maximizer; the estimator reports it as a diagnostic only.
inline bool variance_dominates(const TargetSet& t, const Matrix& test) {
  if (test.rows() < 2 || t.size() < 2) return false;
  Matrix diff = covariance(t.points());
  const Matrix cs = covariance(test);
  for (std::size_t i = 0; i < diff.rows(); ++i)
    for (std::size_t j = 0; j < diff.cols(); ++j) diff(i, j) -= cs(i, j);
  Cholesky chol;
  return chol.factor(diff, 1e-12);
}

}  // namespace hullmle
