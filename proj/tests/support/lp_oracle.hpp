#pragma once

// Brute-force LP reference for tiny problems: enumerates every basic
// solution (n active constraints among rows and finite bounds) with its own
// Gaussian elimination and keeps the best feasible one. Only meaningful when
// every variable is boxed, so that a feasible problem has an optimal vertex.

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

struct Halfspace {
  std::vector<double> a;
  double b;
  int sense;  // +1: a.x >= b, -1: a.x <= b, 0: a.x == b
};

struct VertexResult {
  bool feasible = false;
  double value = std::numeric_limits<double>::infinity();
  std::vector<double> x;
};

inline std::optional<std::vector<double>> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    if (std::abs(a[p][c]) < 1e-11) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Minimizes c.x over the given halfspaces.
inline VertexResult enumerate_vertices(const std::vector<double>& c, const std::vector<Halfspace>& cons,
                                       double tol = 1e-9) {
  const std::size_t n = c.size();
  const std::size_t m = cons.size();
  VertexResult best;
  std::vector<std::size_t> pick(n);
  // iterate over n-combinations of m
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  if (m < n) return best;
  for (;;) {
    {
      std::vector<std::vector<double>> a;
      std::vector<double> b;
      for (auto p : pick) {
        a.push_back(cons[p].a);
        b.push_back(cons[p].b);
      }
      if (auto x = gauss_solve(a, b)) {
        bool ok = true;
        for (const auto& h : cons) {
          double s = 0;
          for (std::size_t j = 0; j < n; ++j) s += h.a[j] * (*x)[j];
          const double t = tol * (1 + std::abs(h.b));
          if (h.sense >= 0 && s < h.b - t) ok = false;
          if (h.sense <= 0 && s > h.b + t) ok = false;
        }
        if (ok) {
          double v = 0;
          for (std::size_t j = 0; j < n; ++j) v += c[j] * (*x)[j];
          if (!best.feasible || v < best.value) {
            best.feasible = true;
            best.value = v;
            best.x = *x;
          }
        }
      }
    }
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == m - n + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

}  // namespace oracle
