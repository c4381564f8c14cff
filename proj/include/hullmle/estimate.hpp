#pragma once

// Monte Carlo MLE for the toy graph models with missing data: repeatedly
// rescale the constrained sample into the hull of the unconstrained one,
// step toward the maximizer of the sampled likelihood ratio, and resample,
// until every test point is comfortably interior. Also an exact-enumeration
// MLE for validation.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hullmle/batch.hpp"
#include "hullmle/expfam.hpp"
#include "hullmle/hull.hpp"
#include "hullmle/optimize.hpp"
#include "hullmle/parallel.hpp"

namespace hullmle {

struct GraphModel {
  StatDef def;
  std::size_t n = 0;
};

struct EstimatorConfig {
  std::size_t r_target = 500;
  std::size_t s_test = 100;
  double safety_factor = 0.9;
  double stop_threshold = 1.11;
  std::size_t max_outer_iterations = 10;
  double grad_tol = 1e-8;
  std::size_t max_inner_iterations = 500;
  std::size_t mcmc_interval = 0;  // 0: sampler default
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  SolverConfig solver;

  void validate() const {
    if (!(safety_factor > 0.0 && safety_factor < 1.0)) throw std::invalid_argument("safety factor must lie in (0, 1)");
    if (!(stop_threshold > 1.0)) throw std::invalid_argument("stop threshold must exceed 1");
    if (r_target == 0 || s_test == 0 || max_outer_iterations == 0 || max_inner_iterations == 0)
      throw std::invalid_argument("sample sizes and iteration limits must be positive");
    if (!(grad_tol > 0.0)) throw std::invalid_argument("gradient tolerance must be positive");
    solver.validate();
  }
};

struct StepResult {
  Vector theta;
  Vector dtheta;
  double objective = 0.0;  // rescaled ratio at dtheta
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// theta0 + argmax over dtheta of loglik_ratio_hat(dtheta, gy, gz, effective_scale).
/// gy and gz must already be centered by the gy column means.
inline StepResult maximize_ratio(std::span<const double> theta0, const Matrix& gy, const Matrix& gz,
                                 double effective_scale, const EstimatorConfig& cfg) {
  if (!std::isfinite(effective_scale) || !(effective_scale > 0.0))
    throw std::invalid_argument("rescaled step needs a finite positive scale");
  BfgsOptions opt;
  opt.grad_tol = cfg.grad_tol;
  opt.max_iterations = cfg.max_inner_iterations;
  opt.seed = derive_seed(cfg.seed, 0xb5f5);
  auto fg = [&](const Vector& dt, Vector& grad) {
    grad = loglik_ratio_grad(dt, gy, gz, effective_scale);
    return loglik_ratio_hat(dt, gy, gz, effective_scale);
  };
  const BfgsResult res = bfgs_maximize(fg, Vector(theta0.size(), 0.0), opt);
  StepResult out;
  out.dtheta = res.x;
  out.theta.assign(theta0.begin(), theta0.end());
  for (std::size_t i = 0; i < out.theta.size(); ++i) out.theta[i] += res.x[i];
  out.objective = res.value;
  out.grad_norm = res.grad_norm;
  out.iterations = res.iterations;
  out.converged = res.converged;
  return out;
}

/// One step of the procedure: maximize the ratio with the test rows pulled
/// in by safety_factor * scale, where scale is their min-scale multiplier.
inline StepResult rescaled_step(std::span<const double> theta0, const Matrix& gy, const Matrix& gz, double scale,
                                const EstimatorConfig& cfg) {
  return maximize_ratio(theta0, gy, gz, cfg.safety_factor * scale, cfg);
}

class DegenerateSampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TraceEntry {
  Vector theta;
  double multiplier;
  bool variance_dominates;  // diagnostic only
  bool step_converged;      // inner optimizer status for the step taken from here
};

struct EstimatorTrace {
  std::vector<TraceEntry> iterations;
  Vector final_theta;
  bool converged = false;
};

struct SamplePair {
  Matrix gy;  // centered by its own column means
  Matrix gz;  // centered by the same means
};

inline SamplePair draw_samples(const GraphModel& model, const ObservationMask& mask, std::span<const double> theta,
                               std::size_t iteration, const EstimatorConfig& cfg) {
  McmcOptions opt;
  opt.interval = cfg.mcmc_interval;
  StatMatrix y, z;
  parallel_for(2, cfg.threads, [&](std::size_t which) {
    const std::uint64_t seed = derive_seed(cfg.seed, iteration, which);
    if (which == 0) y = mcmc_sample(model.def, theta, model.n, cfg.r_target, nullptr, seed, opt);
    else z = mcmc_sample(model.def, theta, model.n, cfg.s_test, &mask, seed, opt);
  });
  auto [gy, gz] = center_by(y.rows, z.rows);
  return {std::move(gy), std::move(gz)};
}

/// Iterates sampling, min-scale, and rescaled steps until the multiplier
/// reaches stop_threshold or the outer iteration limit is hit. When it
/// converges, final_theta adds one unscaled maximization step from the
/// last recorded theta.
inline EstimatorTrace iterate_until_contained(const GraphModel& model, const Graph& y_obs, const ObservationMask& mask,
                                              std::span<const double> theta0, const EstimatorConfig& cfg) {
  cfg.validate();
  model.def.validate();
  if (theta0.size() != model.def.size()) throw std::invalid_argument("theta0 has the wrong dimension");
  if (!all_finite(theta0)) throw std::invalid_argument("theta0 is not finite");
  if (y_obs.vertices() != model.n) throw std::invalid_argument("observed graph has the wrong vertex count");
  if (!mask.consistent_with(y_obs)) throw std::invalid_argument("mask disagrees with the observed graph");
  if (mask.observed_count() == 0) throw std::invalid_argument("nothing observed: every dyad is missing");

  EstimatorTrace trace;
  Vector theta(theta0.begin(), theta0.end());
  const Vector origin(model.def.size(), 0.0);
  for (std::size_t it = 0; it < cfg.max_outer_iterations; ++it) {
    const SamplePair s = draw_samples(model, mask, theta, it, cfg);
    const TargetSet t = TargetSet::from_centered(s.gy, origin);
    if (!t.full_rank())
      throw DegenerateSampleError("unconstrained sample statistics span only " + std::to_string(t.rank()) + " of " +
                                  std::to_string(t.dim()) +
                                  " dimensions; draw more samples or use fewer statistics");
    const ScaleReport rep = min_scale(t, s.gz, cfg.solver, cfg.threads);
    TraceEntry entry{theta, rep.min_scale, variance_dominates(t, s.gz), true};
    if (rep.min_scale >= cfg.stop_threshold) {
      const StepResult last = maximize_ratio(theta, s.gy, s.gz, 1.0, cfg);
      entry.step_converged = last.converged;
      trace.iterations.push_back(std::move(entry));
      trace.final_theta = last.theta;
      trace.converged = true;
      return trace;
    }
    const StepResult step = rescaled_step(theta, s.gy, s.gz, rep.min_scale, cfg);
    entry.step_converged = step.converged;
    trace.iterations.push_back(std::move(entry));
    theta = step.theta;
  }
  trace.final_theta = theta;
  return trace;
}

// ---------------------------------------------------------------------------
// Exact MLE

class NonexistentMle : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExactMle {
  Vector theta;
  double loglik = 0.0;
  double grad_norm = 0.0;
  std::size_t iterations = 0;
  Moments full;       // moments under the unconstrained model at theta
  Moments completed;  // moments under the constrained model at theta
};

/// Maximizes the exact missing-data log-likelihood by damped Newton ascent.
/// Throws NonexistentMle unless every attainable completion of the observed
/// graph has its statistic strictly inside the hull of all attainable
/// statistics; that condition guarantees the maximum is attained.
inline ExactMle exact_mle(const GraphModel& model, const Graph& y_obs, const ObservationMask& mask,
                          double grad_tol = 1e-8, std::size_t max_iterations = 200) {
  model.def.validate();
  if (y_obs.vertices() != model.n) throw std::invalid_argument("observed graph has the wrong vertex count");
  if (!mask.consistent_with(y_obs)) throw std::invalid_argument("mask disagrees with the observed graph");
  const std::size_t d = model.def.size();
  const StatSupport full = enumerate_support(model.def, model.n);
  StatSupport cond;
  if (mask.free_dyads().empty()) {
    cond.stats = Matrix(1, d);
    const Vector g = statistics(y_obs, model.def);
    std::copy(g.begin(), g.end(), cond.stats.row(0).begin());
    cond.log_counts = {0.0};
  } else {
    cond = enumerate_support(model.def, model.n, &mask);
  }

  const TargetSet hull = make_target_set(full.stats);
  if (!hull.full_rank()) throw NonexistentMle("attainable statistics do not span the parameter space");
  SolverConfig strict;
  const ScaleReport rep = min_scale(hull, cond.stats, strict);
  if (!(rep.min_scale > 1.0 + 1e-9))
    throw NonexistentMle("observed statistics lie on the boundary of the attainable set (scale " +
                         std::to_string(rep.min_scale) + ")");

  Vector theta(d, 0.0);
  auto eval = [&](const Vector& th, Moments& mf, Moments& mc) {
    mf = moments(full, th);
    mc = moments(cond, th);
    return log_kappa(cond, th) - log_kappa(full, th);
  };
  auto gradient = [&](const Moments& mf, const Moments& mc) {
    Vector g(d);
    for (std::size_t a = 0; a < d; ++a) g[a] = mc.mean[a] - mf.mean[a];
    return g;
  };
  // Newton direction on -loglik: (Cov_full - Cov_cond) p = grad
  auto newton = [&](const Moments& mf, const Moments& mc, const Vector& grad) {
    Matrix neg_hess(d, d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) neg_hess(a, b) = mf.covariance(a, b) - mc.covariance(a, b);
    Vector p;
    Cholesky chol;
    if (chol.factor(neg_hess, 1e-14)) p = chol.solve(grad);
    if (p.empty() || !(dot(p, grad) > 0.0)) p = grad;
    return p;
  };
  Moments mf, mc;
  double f = eval(theta, mf, mc);
  ExactMle out;
  for (std::size_t it = 0; it <= max_iterations; ++it) {
    Vector grad = gradient(mf, mc);
    if (norm2(grad) <= grad_tol) {
      // quadratic convergence: a few more full steps cost little and take
      // theta to rounding level
      for (int polish = 0; polish < 3; ++polish) {
        Vector trial = theta;
        const Vector p = newton(mf, mc, grad);
        for (std::size_t a = 0; a < d; ++a) trial[a] += p[a];
        Moments tf, tc;
        const double ft = eval(trial, tf, tc);
        const Vector tg = gradient(tf, tc);
        if (!(norm2(tg) < norm2(grad))) break;
        theta = std::move(trial);
        f = ft;
        mf = std::move(tf);
        mc = std::move(tc);
        grad = tg;
      }
      out.theta = theta;
      out.loglik = f;
      out.grad_norm = norm2(grad);
      out.iterations = it;
      out.full = mf;
      out.completed = mc;
      return out;
    }
    if (it == max_iterations) break;
    const Vector p = newton(mf, mc, grad);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      Vector trial = theta;
      for (std::size_t a = 0; a < d; ++a) trial[a] += t * p[a];
      Moments tf, tc;
      const double ft = eval(trial, tf, tc);
      if (std::isfinite(ft) && ft >= f + 1e-4 * t * dot(p, grad) - 1e-15 * (1.0 + std::abs(f))) {
        theta = std::move(trial);
        f = ft;
        mf = std::move(tf);
        mc = std::move(tc);
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  throw std::runtime_error("exact_mle: Newton ascent did not reach the gradient tolerance");
}

}  // namespace hullmle
