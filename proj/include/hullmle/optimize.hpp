#pragma once

// BFGS maximization with Armijo backtracking.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "hullmle/numerics.hpp"
#include "hullmle/random.hpp"

namespace hullmle {

struct BfgsOptions {
  double grad_tol = 1e-8;      // stop when ||grad||_2 <= grad_tol
  std::size_t max_iterations = 500;
  double armijo_c1 = 1e-4;
  std::size_t max_halvings = 60;
  double restart_scale = 1e-3;  // size of the random perturbation on restart
  std::uint64_t seed = 0x5eed;
};

struct BfgsResult {
  Vector x;
  double value = -kInfinity;
  Vector gradient;
  double grad_norm = kInfinity;
  std::size_t iterations = 0;
  bool converged = false;
  bool restarted = false;
};

/// Maximizes f. `fg(x, grad)` returns f(x) and writes its gradient.
/// On a failed line search the search restarts once from a small random
/// perturbation of the current point; a second failure ends the run with
/// converged = false and the best point found.
inline BfgsResult bfgs_maximize(const std::function<double(const Vector&, Vector&)>& fg, Vector x0,
                                const BfgsOptions& opt = {}) {
  const std::size_t d = x0.size();
  BfgsResult best;
  Rng rng(opt.seed);
  Vector x = std::move(x0), g(d), gn(d), p(d), xn(d);
  double f = fg(x, g);
  if (!std::isfinite(f)) throw std::domain_error("bfgs: objective is not finite at the start");
  Matrix h = Matrix::identity(d);  // inverse Hessian of -f
  bool restarted = false;
  const double eps = std::numeric_limits<double>::epsilon();

  auto record = [&](std::size_t it, bool conv) {
    best.x = x;
    best.value = f;
    best.gradient = g;
    best.grad_norm = norm2(g);
    best.iterations = it;
    best.converged = conv;
    best.restarted = restarted;
  };

  for (std::size_t it = 0; it < opt.max_iterations; ++it) {
    if (norm2(g) <= opt.grad_tol) {
      record(it, true);
      return best;
    }
    // ascent direction p = H g
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += h(i, j) * g[j];
      p[i] = s;
    }
    double slope = dot(g, p);
    if (!(slope > 0.0)) {
      h = Matrix::identity(d);
      p = g;
      slope = dot(g, g);
    }

    double t = 1.0, fn = -kInfinity;
    bool accepted = false;
    for (std::size_t k = 0; k < opt.max_halvings; ++k, t *= 0.5) {
      for (std::size_t i = 0; i < d; ++i) xn[i] = x[i] + t * p[i];
      fn = fg(xn, gn);
      if (!std::isfinite(fn)) continue;
      if (fn >= f + opt.armijo_c1 * t * slope) {
        accepted = true;
        break;
      }
      // Near the optimum the decrease drowns in rounding; accept a step
      // that keeps f within a few ulps and shrinks the gradient.
      if (fn >= f - 4 * eps * (1.0 + std::abs(f)) && norm2(gn) < norm2(g)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (restarted) {
        record(it, false);
        return best;
      }
      restarted = true;
      for (std::size_t i = 0; i < d; ++i) x[i] += opt.restart_scale * (1.0 + std::abs(x[i])) * rng.normal();
      f = fg(x, g);
      h = Matrix::identity(d);
      continue;
    }

    // BFGS update for the inverse Hessian of -f: s = step, y = -(gn - g)
    Vector s(d), y(d);
    for (std::size_t i = 0; i < d; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = g[i] - gn[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * norm2(s) * norm2(y)) {
      const double rho = 1.0 / sy;
      Vector hy(d);
      for (std::size_t i = 0; i < d; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < d; ++j) acc += h(i, j) * y[j];
        hy[i] = acc;
      }
      const double yhy = dot(y, hy);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          h(i, j) += (1.0 + rho * yhy) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
    }
    x = xn;
    g = gn;
    f = fn;
  }
  record(opt.max_iterations, norm2(g) <= opt.grad_tol);
  return best;
}

}  // namespace hullmle
