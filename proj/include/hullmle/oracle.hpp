#pragma once

// Geometric reference answers that share no code with the LP path. Used to
// validate hull queries on small instances.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hullmle/hull.hpp"

namespace hullmle {

enum class Membership { InsideClosure, Outside };

namespace detail {

// Solves a small dense system by Gaussian elimination with partial pivoting.
// Returns false if the matrix is numerically singular.
inline bool small_solve(std::vector<double> a, std::vector<double> b, std::size_t n, std::vector<double>& x) {
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (std::abs(a[piv * n + c]) <= 1e-12 * scale) return false;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
    x[i] = s / a[i * n + i];
  }
  return true;
}

}  // namespace detail

/// Closed-hull membership by Caratheodory: p is in the hull iff it is a
/// convex combination of some d+1 of the points. Enumerates every such
/// subset, so it is limited to r <= 15 and d <= 4.
inline Membership oracle_membership_small(const TargetSet& t, std::span<const double> p_raw) {
  const std::size_t r = t.size(), d = t.dim();
  if (r > 15 || d > 4) throw std::invalid_argument("oracle_membership_small: instance too large");
  if (!t.full_rank()) throw std::invalid_argument("oracle_membership_small: target set is rank deficient");
  const Vector p = t.to_centered(p_raw);
  const std::size_t k = d + 1;
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), 0);
  std::vector<double> a(k * k), b(k), lambda;
  for (;;) {
    // rows 0..d-1: coordinates; row d: weights sum to one
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t j = 0; j < d; ++j) a[j * k + c] = t.points()(pick[c], j);
      a[d * k + c] = 1.0;
    }
    for (std::size_t j = 0; j < d; ++j) b[j] = p[j];
    b[d] = 1.0;
    if (detail::small_solve(a, b, k, lambda) &&
        std::all_of(lambda.begin(), lambda.end(), [](double l) { return l >= -1e-9; }))
      return Membership::InsideClosure;
    std::size_t i = k;
    while (i > 0 && pick[i - 1] == r - k + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return Membership::Outside;
}

/// Planar convex hull (Andrew's monotone chain), counter-clockwise, with
/// collinear points dropped.
inline std::vector<std::array<double, 2>> monotone_chain(std::vector<std::array<double, 2>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::array<double, 2>> hull(2 * pts.size());
  std::size_t h = 0;
  for (const auto& q : pts) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], q) <= 0) --h;
    hull[h++] = q;
  }
  for (std::size_t i = pts.size() - 1, lower = h + 1; i-- > 0;) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
    hull[h++] = pts[i];
  }
  hull.resize(h - 1);
  return hull;
}

/// Exact 2D boundary scale: intersects the ray from the origin through p
/// with every hull edge facing it.
inline HullVerdict oracle_2d(const TargetSet& t, std::span<const double> p_raw, double boundary_tol = 1e-7) {
  if (t.dim() != 2) throw std::invalid_argument("oracle_2d: target set must be two-dimensional");
  if (!t.full_rank()) throw std::invalid_argument("oracle_2d: target set is rank deficient");
  const Vector p = t.to_centered(p_raw);
  if (p[0] == 0.0 && p[1] == 0.0) throw std::invalid_argument("oracle_2d: p coincides with the reference point");
  std::vector<std::array<double, 2>> pts(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) pts[i] = {t.points()(i, 0), t.points()(i, 1)};
  const auto hull = monotone_chain(std::move(pts));

  HullVerdict v;
  double best_c = 0.0;
  std::array<double, 2> best_n{0.0, 0.0};
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    const double nx = b[1] - a[1], ny = -(b[0] - a[0]);  // outward for CCW order
    const double np = nx * p[0] + ny * p[1];
    if (np <= 0.0) continue;
    const double c = nx * a[0] + ny * a[1];
    if (c <= 0.0) throw std::invalid_argument("oracle_2d: reference point is not interior");
    const double g = c / np;
    if (g < v.gamma) {
      v.gamma = g;
      best_c = c;
      best_n = {nx, ny};
    }
  }
  if (!std::isfinite(v.gamma)) throw std::logic_error("oracle_2d: ray leaves no edge");
  v.status = detail::classify(v.gamma, boundary_tol);
  v.boundary_point = {v.gamma * p[0] + t.centroid()[0], v.gamma * p[1] + t.centroid()[1]};
  if (v.status == HullStatus::Exterior) v.hyperplane = Hyperplane{1.0, {-best_n[0] / best_c, -best_n[1] / best_c}};
  return v;
}

}  // namespace hullmle
