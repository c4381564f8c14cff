#pragma once

// Interior-of-convex-hull queries. A TargetSet stores its points translated
// so that a reference point (normally the centroid) sits at the origin; all
// LPs below are posed in those centered coordinates.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hullmle/lp.hpp"
#include "hullmle/numerics.hpp"

namespace hullmle {

class TargetSet {
 public:
  TargetSet() = default;

  /// Points already expressed relative to `centroid`. Nothing is re-centered,
  /// so the origin need not be the column mean (pruned sets, hand-built
  /// examples whose reference point is chosen by the caller). Queries assume
  /// the origin is interior to the hull of the points.
  static TargetSet from_centered(Matrix points, Vector centroid) {
    if (points.rows() == 0 || points.cols() == 0) throw std::invalid_argument("TargetSet: empty point set");
    if (centroid.size() != points.cols()) throw std::invalid_argument("TargetSet: centroid dimension mismatch");
    if (!all_finite(points) || !all_finite(centroid)) throw std::domain_error("TargetSet: non-finite entries");
    TargetSet t;
    t.rank_ = hullmle::rank(points);
    t.points_ = std::move(points);
    t.centroid_ = std::move(centroid);
    return t;
  }

  const Matrix& points() const noexcept { return points_; }
  const Vector& centroid() const noexcept { return centroid_; }
  std::size_t rank() const noexcept { return rank_; }
  std::size_t size() const noexcept { return points_.rows(); }
  std::size_t dim() const noexcept { return points_.cols(); }
  bool full_rank() const noexcept { return rank_ == dim(); }

  /// p_raw - centroid, with a dimension check.
  Vector to_centered(std::span<const double> p_raw) const {
    if (p_raw.size() != dim())
      throw std::invalid_argument("point has dimension " + std::to_string(p_raw.size()) + ", target set has " +
                                  std::to_string(dim()));
    if (!all_finite(p_raw)) throw std::domain_error("point has non-finite entries");
    return subtract(p_raw, centroid_);
  }

 private:
  Matrix points_;
  Vector centroid_;
  std::size_t rank_ = 0;
};

inline TargetSet make_target_set(const Matrix& raw) {
  Centered c = center(raw);
  return TargetSet::from_centered(std::move(c.centered), std::move(c.centroid));
}

enum class HullStatus { Interior, Boundary, Exterior, Degenerate };

inline const char* to_string(HullStatus s) {
  switch (s) {
    case HullStatus::Interior: return "interior";
    case HullStatus::Boundary: return "boundary";
    case HullStatus::Exterior: return "exterior";
    case HullStatus::Degenerate: return "degenerate";
  }
  return "unknown";
}

/// {x : offset + x.normal = 0} in centered coordinates.
struct Hyperplane {
  double offset = 1.0;
  Vector normal;
};

struct HullVerdict {
  HullStatus status = HullStatus::Degenerate;
  double gamma = kInfinity;
  Vector boundary_point;             // original coordinates; empty if Degenerate or gamma infinite
  std::optional<Hyperplane> hyperplane;  // Exterior only
  Vector solution;                   // LP minimizer z (empty unless solved to optimality)
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;
};

namespace detail {

inline HullStatus classify(double gamma, double boundary_tol) {
  if (std::abs(gamma - 1.0) <= boundary_tol * (1.0 + std::abs(gamma))) return HullStatus::Boundary;
  return gamma > 1.0 ? HullStatus::Interior : HullStatus::Exterior;
}

inline lp::LinearProgram polar_program(const Matrix& m, Vector objective) {
  lp::LinearProgram prog;
  prog.sense = lp::Objective::Minimize;
  prog.objective = std::move(objective);
  prog.constraints = m;
  prog.row_senses.assign(m.rows(), lp::RowSense::GreaterEqual);
  prog.rhs.assign(m.rows(), -1.0);
  return prog;
}

}  // namespace detail

/// Minimize p.z subject to M z >= -1 with z free. gamma = -1 / optimum is
/// the factor that puts gamma * p on the hull boundary.
inline HullVerdict query(const TargetSet& t, std::span<const double> p_raw, const SolverConfig& cfg = {}) {
  cfg.validate();
  const Vector p = t.to_centered(p_raw);
  HullVerdict v;
  if (!t.full_rank()) return v;
  if (norm_inf(p) <= cfg.feas_tol) {
    v.status = HullStatus::Interior;
    return v;
  }
  const lp::LpSolution sol = lp::solve(detail::polar_program(t.points(), p), cfg);
  v.iterations = sol.iterations;
  if (sol.status != lp::Status::Optimal) return v;  // unbounded: origin not interior

  v.solution = sol.primal;
  v.objective = sol.objective_value;
  v.gamma = v.objective < 0.0 ? -1.0 / v.objective : kInfinity;
  v.status = detail::classify(v.gamma, cfg.boundary_tol);
  if (std::isfinite(v.gamma)) {
    v.boundary_point = scaled(p, v.gamma);
    for (std::size_t j = 0; j < p.size(); ++j) v.boundary_point[j] += t.centroid()[j];
  }
  if (v.status == HullStatus::Exterior) v.hyperplane = Hyperplane{1.0, sol.primal};
  return v;
}

struct OriginalLpResult {
  lp::Status status = lp::Status::Optimal;
  double objective = 0.0;
  double z0 = 0.0;
  Vector z;

  /// Where the hyperplane z0 + x.z = 0 meets the ray t * p (t > 0), or
  /// infinity if it does not.
  double intersection(std::span<const double> p) const {
    const double pz = dot(p, z);
    if (pz >= 0.0) return kInfinity;
    return -z0 / pz;
  }
};

/// The box-constrained form: minimize z0 + p.z subject to z0 + M_i z >= 0,
/// -1 <= z <= 1, z0 free. A negative optimum certifies p outside the
/// closed hull; zero means p is in the closure.
inline OriginalLpResult query_original_lp(const TargetSet& t, std::span<const double> p_raw,
                                          const SolverConfig& cfg = {}) {
  cfg.validate();
  const Vector p = t.to_centered(p_raw);
  const std::size_t d = t.dim();
  const std::size_t r = t.size();
  lp::LinearProgram prog;
  prog.sense = lp::Objective::Minimize;
  prog.objective.assign(d + 1, 1.0);
  std::copy(p.begin(), p.end(), prog.objective.begin() + 1);
  prog.constraints = Matrix(r, d + 1);
  for (std::size_t i = 0; i < r; ++i) {
    prog.constraints(i, 0) = 1.0;
    for (std::size_t j = 0; j < d; ++j) prog.constraints(i, j + 1) = t.points()(i, j);
  }
  prog.row_senses.assign(r, lp::RowSense::GreaterEqual);
  prog.rhs.assign(r, 0.0);
  prog.lower.assign(d + 1, -1.0);
  prog.upper.assign(d + 1, 1.0);
  prog.lower[0] = -kInfinity;
  prog.upper[0] = kInfinity;

  const lp::LpSolution sol = lp::solve(prog, cfg);
  OriginalLpResult out;
  out.status = sol.status;
  if (!sol.optimal()) return out;
  out.objective = sol.objective_value;
  out.z0 = sol.primal[0];
  out.z.assign(sol.primal.begin() + 1, sol.primal.end());
  return out;
}

struct TrialStep {
  Vector point;        // centered point the LP was solved at
  double objective;
  double step;         // intersection parameter along the ray; 1 once in the closure
  Hyperplane hyperplane;
};

struct TrialResult {
  std::vector<TrialStep> steps;
  double gamma = 1.0;
  bool reached_closure = false;
};

/// Repeatedly applies the box-constrained LP, moving the point to where the
/// returned hyperplane crosses the ray, until the LP reports the closure.
/// gamma is the product of the steps.
inline TrialResult trial_and_error_boundary(const TargetSet& t, std::span<const double> p_raw,
                                            const SolverConfig& cfg = {}, std::size_t max_rounds = 50) {
  TrialResult out;
  Vector q = t.to_centered(p_raw);
  for (std::size_t round = 0; round < max_rounds; ++round) {
    Vector q_raw = q;
    for (std::size_t j = 0; j < q.size(); ++j) q_raw[j] += t.centroid()[j];
    const OriginalLpResult res = query_original_lp(t, q_raw, cfg);
    if (res.status != lp::Status::Optimal) throw std::runtime_error("box-constrained LP did not solve");
    TrialStep step{q, res.objective, 1.0, Hyperplane{res.z0, res.z}};
    if (res.objective >= -cfg.feas_tol) {
      out.steps.push_back(std::move(step));
      out.reached_closure = true;
      return out;
    }
    step.step = res.intersection(q);
    if (!std::isfinite(step.step)) throw std::runtime_error("box-constrained LP hyperplane misses the ray");
    out.gamma *= step.step;
    q = scaled(q, step.step);
    out.steps.push_back(std::move(step));
  }
  return out;
}

struct DualResult {
  bool degenerate = false;      // p outside the cone spanned by M's rows
  double max_objective = std::numeric_limits<double>::quiet_NaN();
  Vector weights;
  std::size_t iterations = 0;
};

/// maximize -1.y subject to M^T y = p, y >= 0.
inline DualResult query_dual(const TargetSet& t, std::span<const double> p_raw, const SolverConfig& cfg = {}) {
  cfg.validate();
  const Vector p = t.to_centered(p_raw);
  const lp::LinearProgram dual = lp::dual_of(detail::polar_program(t.points(), p));
  const lp::LpSolution sol = lp::solve(dual, cfg);
  DualResult out;
  out.iterations = sol.iterations;
  if (sol.status != lp::Status::Optimal) {
    out.degenerate = true;
    return out;
  }
  out.max_objective = sol.objective_value;
  out.weights = sol.primal;
  return out;
}

/// Invertible R with R p = e1: swap coordinate 0 with the largest |p_k|,
/// then shear.
inline Matrix axis_alignment_transform(std::span<const double> p) {
  const std::size_t d = p.size();
  if (d == 0 || norm_inf(p) == 0.0) throw std::invalid_argument("axis_alignment_transform: p must be nonzero");
  std::size_t k = 0;
  for (std::size_t j = 1; j < d; ++j)
    if (std::abs(p[j]) > std::abs(p[k])) k = j;
  Vector q(p.begin(), p.end());
  std::swap(q[0], q[k]);
  Matrix r1 = Matrix::identity(d);
  r1(0, 0) = 1.0 / q[0];
  for (std::size_t i = 1; i < d; ++i) r1(i, 0) = -q[i] / q[0];
  Matrix perm = Matrix::identity(d);
  perm(0, 0) = perm(k, k) = 0.0;
  perm(0, k) = perm(k, 0) = 1.0;
  return multiply(r1, perm);
}

struct AxisLpResult {
  double z1 = std::numeric_limits<double>::quiet_NaN();
  Vector z;
  lp::Status status = lp::Status::Optimal;
};

/// minimize z_1 subject to (M R^T) z >= -1, with R from axis_alignment_transform.
inline AxisLpResult solve_axis_lp(const TargetSet& t, std::span<const double> p_raw, const SolverConfig& cfg = {}) {
  cfg.validate();
  const Vector p = t.to_centered(p_raw);
  const Matrix r = axis_alignment_transform(p);
  Vector e1(t.dim(), 0.0);
  e1[0] = 1.0;
  const lp::LpSolution sol = lp::solve(detail::polar_program(transform_rows(t.points(), r), e1), cfg);
  AxisLpResult out;
  out.status = sol.status;
  if (sol.optimal()) {
    out.z = sol.primal;
    out.z1 = sol.primal[0];
  }
  return out;
}

/// Applies x -> A x to the target set and the point and checks that status
/// agrees and gamma agrees to `rel_tol`.
inline bool transform_invariance_check(const TargetSet& t, std::span<const double> p_raw, const Matrix& a,
                                       const SolverConfig& cfg = {}, double rel_tol = 1e-7) {
  if (a.rows() != t.dim() || a.cols() != t.dim()) throw std::invalid_argument("transform: dimension mismatch");
  LuDecomposition lu;
  lu.factor(a);
  if (lu.singular()) throw std::invalid_argument("transform: matrix is singular");
  const TargetSet moved = TargetSet::from_centered(transform_rows(t.points(), a), multiply(a, t.centroid()));
  const HullVerdict before = query(t, p_raw, cfg);
  const HullVerdict after = query(moved, multiply(a, Vector(p_raw.begin(), p_raw.end())), cfg);
  if (before.status != after.status) return false;
  if (std::isinf(before.gamma) || std::isinf(after.gamma)) return std::isinf(before.gamma) == std::isinf(after.gamma);
  return std::abs(before.gamma - after.gamma) <= rel_tol * std::max(1.0, std::abs(before.gamma));
}

}  // namespace hullmle
