#pragma once

// Toy exponential-family random graph models on undirected simple graphs:
// statistics, exact normalizers by enumeration, Metropolis sampling, and the
// sampled log-likelihood ratio used by Monte Carlo MLE.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hullmle/numerics.hpp"
#include "hullmle/random.hpp"

namespace hullmle {

// ---------------------------------------------------------------------------
// Graphs

class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n) : n_(n), adj_(n * n, 0), degree_(n, 0) {
    if (n < 2) throw std::invalid_argument("Graph: need at least two vertices");
  }

  static std::size_t dyad_count(std::size_t n) { return n * (n - 1) / 2; }

  std::size_t vertices() const noexcept { return n_; }
  std::size_t dyads() const noexcept { return dyad_count(n_); }

  /// Index of the unordered pair {i, j}, i != j, in row-major upper-triangle order.
  std::size_t dyad_index(std::size_t i, std::size_t j) const {
    check_pair(i, j);
    if (i > j) std::swap(i, j);
    return i * n_ - i * (i + 1) / 2 + (j - i - 1);
  }

  std::pair<std::size_t, std::size_t> dyad_pair(std::size_t k) const {
    if (k >= dyads()) throw std::out_of_range("Graph: dyad index out of range");
    std::size_t i = 0;
    while (k >= n_ - 1 - i) {
      k -= n_ - 1 - i;
      ++i;
    }
    return {i, i + 1 + k};
  }

  bool has_edge(std::size_t i, std::size_t j) const { return adj_[i * n_ + j] != 0; }
  bool has_dyad(std::size_t k) const {
    const auto [i, j] = dyad_pair(k);
    return has_edge(i, j);
  }

  void set_edge(std::size_t i, std::size_t j, bool present) {
    check_pair(i, j);
    if (has_edge(i, j) == present) return;
    adj_[i * n_ + j] = adj_[j * n_ + i] = present ? 1 : 0;
    const int delta = present ? 1 : -1;
    degree_[i] += delta;
    degree_[j] += delta;
    edges_ += delta;
  }

  void toggle(std::size_t i, std::size_t j) { set_edge(i, j, !has_edge(i, j)); }

  std::size_t degree(std::size_t i) const { return static_cast<std::size_t>(degree_[i]); }
  std::size_t edge_count() const noexcept { return static_cast<std::size_t>(edges_); }

  std::size_t common_neighbors(std::size_t i, std::size_t j) const {
    std::size_t c = 0;
    const std::uint8_t* a = &adj_[i * n_];
    const std::uint8_t* b = &adj_[j * n_];
    for (std::size_t k = 0; k < n_; ++k) c += a[k] & b[k];
    return c;
  }

  static Graph complete(std::size_t n) {
    Graph g(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) g.set_edge(i, j, true);
    return g;
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.adj_ == b.adj_; }

 private:
  void check_pair(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw std::out_of_range("Graph: vertex out of range");
    if (i == j) throw std::invalid_argument("Graph: self-loops are not allowed");
  }

  std::size_t n_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<int> degree_;
  int edges_ = 0;
};

// ---------------------------------------------------------------------------
// Statistics

enum class Term { Edges, TwoStars, Triangles };

inline const char* to_string(Term t) {
  switch (t) {
    case Term::Edges: return "edges";
    case Term::TwoStars: return "twostars";
    case Term::Triangles: return "triangles";
  }
  return "unknown";
}

inline Term parse_term(const std::string& s) {
  if (s == "edges") return Term::Edges;
  if (s == "twostars" || s == "2stars" || s == "kstar2") return Term::TwoStars;
  if (s == "triangles" || s == "triangle") return Term::Triangles;
  throw std::invalid_argument("unknown statistic term '" + s + "'");
}

struct StatDef {
  std::vector<Term> terms;

  std::size_t size() const noexcept { return terms.size(); }

  void validate() const {
    if (terms.empty()) throw std::invalid_argument("StatDef: no terms");
    for (std::size_t a = 0; a < terms.size(); ++a)
      for (std::size_t b = a + 1; b < terms.size(); ++b)
        if (terms[a] == terms[b]) throw std::invalid_argument("StatDef: duplicate term");
  }
};

inline Vector statistics(const Graph& g, const StatDef& def) {
  def.validate();
  Vector out(def.size(), 0.0);
  const std::size_t n = g.vertices();
  for (std::size_t t = 0; t < def.size(); ++t) {
    switch (def.terms[t]) {
      case Term::Edges: out[t] = static_cast<double>(g.edge_count()); break;
      case Term::TwoStars: {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double k = static_cast<double>(g.degree(i));
          s += k * (k - 1.0) / 2.0;
        }
        out[t] = s;
        break;
      }
      case Term::Triangles: {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) {
            if (!g.has_edge(i, j)) continue;
            for (std::size_t k = j + 1; k < n; ++k) s += (g.has_edge(i, k) && g.has_edge(j, k)) ? 1.0 : 0.0;
          }
        out[t] = s;
        break;
      }
    }
  }
  return out;
}

/// g(y with dyad {i,j} toggled) - g(y), in O(n).
inline void change_statistics(const Graph& g, std::size_t i, std::size_t j, const StatDef& def, double* out) {
  const bool present = g.has_edge(i, j);
  const double sign = present ? -1.0 : 1.0;
  for (std::size_t t = 0; t < def.size(); ++t) {
    switch (def.terms[t]) {
      case Term::Edges: out[t] = sign; break;
      case Term::TwoStars: {
        // degrees excluding the toggled edge itself
        const double di = static_cast<double>(g.degree(i)) - (present ? 1.0 : 0.0);
        const double dj = static_cast<double>(g.degree(j)) - (present ? 1.0 : 0.0);
        out[t] = sign * (di + dj);
        break;
      }
      case Term::Triangles: out[t] = sign * static_cast<double>(g.common_neighbors(i, j)); break;
    }
  }
}

// ---------------------------------------------------------------------------
// Missing data

/// Which dyads were observed, and their values. Unobserved dyads are free.
class ObservationMask {
 public:
  ObservationMask() = default;

  /// Every dyad observed, values from y.
  static ObservationMask all_observed(const Graph& y) { return ObservationMask(y, std::vector<std::uint8_t>(y.dyads(), 1)); }

  /// observed[k] != 0 marks dyad k as observed; values are taken from y.
  ObservationMask(const Graph& y, std::vector<std::uint8_t> observed) : n_(y.vertices()), observed_(std::move(observed)) {
    if (observed_.size() != y.dyads()) throw std::invalid_argument("ObservationMask: wrong number of dyads");
    values_.resize(observed_.size());
    for (std::size_t k = 0; k < observed_.size(); ++k) {
      observed_[k] = observed_[k] ? 1 : 0;
      values_[k] = observed_[k] && y.has_dyad(k) ? 1 : 0;
      if (!observed_[k]) free_.push_back(k);
    }
  }

  std::size_t vertices() const noexcept { return n_; }
  bool observed(std::size_t k) const { return observed_.at(k) != 0; }
  bool value(std::size_t k) const { return values_.at(k) != 0; }
  const std::vector<std::size_t>& free_dyads() const noexcept { return free_; }
  std::size_t observed_count() const noexcept { return observed_.size() - free_.size(); }

  /// True if y agrees with every observed dyad.
  bool consistent_with(const Graph& y) const {
    if (y.vertices() != n_) return false;
    for (std::size_t k = 0; k < observed_.size(); ++k)
      if (observed_[k] && y.has_dyad(k) != (values_[k] != 0)) return false;
    return true;
  }

  /// Graph with observed dyads set and free dyads absent.
  Graph base_graph() const {
    Graph g(n_);
    for (std::size_t k = 0; k < values_.size(); ++k)
      if (values_[k]) {
        const auto [i, j] = g.dyad_pair(k);
        g.set_edge(i, j, true);
      }
    return g;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> observed_, values_;
  std::vector<std::size_t> free_;
};

// ---------------------------------------------------------------------------
// Exact enumeration

inline constexpr std::size_t kMaxEnumeratedDyads = 25;

/// The distinct statistic vectors of a (possibly constrained) sample space
/// with the log of how many graphs attain each.
struct StatSupport {
  Matrix stats;
  Vector log_counts;
};

/// Walks every graph on the free dyads in Gray-code order, one toggle per
/// step, and tallies the statistic vectors.
inline StatSupport enumerate_support(const StatDef& def, std::size_t n, const ObservationMask* mask = nullptr) {
  def.validate();
  Graph g = mask ? mask->base_graph() : Graph(n);
  if (mask && mask->vertices() != n) throw std::invalid_argument("enumerate: mask has the wrong vertex count");
  std::vector<std::size_t> free;
  if (mask) free = mask->free_dyads();
  else
    for (std::size_t k = 0; k < g.dyads(); ++k) free.push_back(k);
  if (free.size() > kMaxEnumeratedDyads)
    throw std::invalid_argument("enumerate: " + std::to_string(free.size()) + " free dyads exceed the limit of " +
                                std::to_string(kMaxEnumeratedDyads));
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t k : free) pairs.push_back(g.dyad_pair(k));

  const std::size_t d = def.size();
  Vector cur = statistics(g, def);
  Vector delta(d);
  constexpr int kBits = 21;
  constexpr std::uint64_t kMask = (std::uint64_t{1} << kBits) - 1;
  if (d * kBits > 64) throw std::invalid_argument("enumerate: too many terms");
  auto pack = [&](const Vector& s) {
    std::uint64_t key = 0;
    for (std::size_t t = 0; t < d; ++t) {
      const auto v = static_cast<std::uint64_t>(std::llround(s[t]));
      if (v > kMask) throw std::overflow_error("enumerate: statistic too large to tally");
      key |= v << (kBits * t);
    }
    return key;
  };
  std::unordered_map<std::uint64_t, std::uint64_t> tally;
  tally.reserve(1024);
  ++tally[pack(cur)];
  const std::uint64_t total = std::uint64_t{1} << free.size();
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto bit = static_cast<std::size_t>(std::countr_zero(step));
    const auto [i, j] = pairs[bit];
    change_statistics(g, i, j, def, delta.data());
    g.toggle(i, j);
    for (std::size_t t = 0; t < d; ++t) cur[t] += delta[t];
    ++tally[pack(cur)];
  }

  std::vector<std::pair<std::uint64_t, std::uint64_t>> items(tally.begin(), tally.end());
  std::sort(items.begin(), items.end());
  StatSupport out;
  out.stats = Matrix(items.size(), d);
  out.log_counts.resize(items.size());
  for (std::size_t r = 0; r < items.size(); ++r) {
    for (std::size_t t = 0; t < d; ++t) out.stats(r, t) = static_cast<double>((items[r].first >> (kBits * t)) & kMask);
    out.log_counts[r] = std::log(static_cast<double>(items[r].second));
  }
  return out;
}

inline double log_kappa(const StatSupport& s, std::span<const double> theta) {
  if (theta.size() != s.stats.cols()) throw std::invalid_argument("log_kappa: theta has the wrong dimension");
  Vector w(s.stats.rows());
  for (std::size_t r = 0; r < w.size(); ++r) w[r] = s.log_counts[r] + dot(s.stats.row(r), theta);
  return log_sum_exp(w);
}

struct Moments {
  Vector mean;
  Matrix covariance;
};

/// Mean and covariance of g under the model restricted to the support.
inline Moments moments(const StatSupport& s, std::span<const double> theta) {
  const std::size_t m = s.stats.rows(), d = s.stats.cols();
  Vector w(m);
  for (std::size_t r = 0; r < m; ++r) w[r] = s.log_counts[r] + dot(s.stats.row(r), theta);
  const double lz = log_sum_exp(w);
  Moments out{Vector(d, 0.0), Matrix(d, d)};
  for (std::size_t r = 0; r < m; ++r) {
    w[r] = std::exp(w[r] - lz);
    for (std::size_t a = 0; a < d; ++a) out.mean[a] += w[r] * s.stats(r, a);
  }
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        out.covariance(a, b) += w[r] * (s.stats(r, a) - out.mean[a]) * (s.stats(r, b) - out.mean[b]);
  return out;
}

inline double exact_log_kappa(const StatDef& def, std::span<const double> theta, std::size_t n,
                              const ObservationMask* mask = nullptr) {
  return log_kappa(enumerate_support(def, n, mask), theta);
}

/// Missing-data log-likelihood log kappa_obs(theta) - log kappa(theta). With
/// every dyad observed this is theta.g(y) - log kappa(theta).
inline double exact_loglik(const StatDef& def, std::span<const double> theta, const Graph& y_obs,
                           const ObservationMask& mask) {
  if (!mask.consistent_with(y_obs)) throw std::invalid_argument("exact_loglik: mask disagrees with the observed graph");
  const double full = exact_log_kappa(def, theta, y_obs.vertices());
  if (mask.free_dyads().empty()) return dot(statistics(y_obs, def), theta) - full;
  return exact_log_kappa(def, theta, y_obs.vertices(), &mask) - full;
}

// ---------------------------------------------------------------------------
// Sampling

enum class SampleKind { Unconstrained, Constrained };

struct StatMatrix {
  Matrix rows;
  SampleKind kind = SampleKind::Unconstrained;
};

struct McmcOptions {
  std::size_t interval = 0;  // 0: 10 x (number of free dyads)
  std::optional<std::size_t> burn_in;  // default 10 x interval
  std::function<void(const Graph&)> on_record;  // sees the state at every recorded draw
};

/// Single-dyad-toggle Metropolis chain with a hold move. Without a mask every dyad is free
/// and the start is a uniformly random graph; with one, only unobserved
/// dyads move and the start is the observed graph with random free dyads.
inline StatMatrix mcmc_sample(const StatDef& def, std::span<const double> theta, std::size_t n, std::size_t count,
                              const ObservationMask* mask, std::uint64_t seed, const McmcOptions& opt = {}) {
  def.validate();
  if (theta.size() != def.size()) throw std::invalid_argument("mcmc_sample: theta has the wrong dimension");
  if (!all_finite(theta)) throw std::invalid_argument("mcmc_sample: theta is not finite");
  if (count == 0) throw std::invalid_argument("mcmc_sample: count must be positive");
  if (mask && mask->vertices() != n) throw std::invalid_argument("mcmc_sample: mask has the wrong vertex count");

  Rng rng(seed);
  Graph g = mask ? mask->base_graph() : Graph(n);
  std::vector<std::pair<std::size_t, std::size_t>> free;
  if (mask)
    for (std::size_t k : mask->free_dyads()) free.push_back(g.dyad_pair(k));
  else
    for (std::size_t k = 0; k < g.dyads(); ++k) free.push_back(g.dyad_pair(k));
  for (const auto& [i, j] : free) g.set_edge(i, j, rng.coin());

  StatMatrix out{Matrix(count, def.size()), mask ? SampleKind::Constrained : SampleKind::Unconstrained};
  Vector cur = statistics(g, def);
  if (free.empty()) {
    for (std::size_t r = 0; r < count; ++r) {
      std::copy(cur.begin(), cur.end(), out.rows.row(r).begin());
      if (opt.on_record) opt.on_record(g);
    }
    return out;
  }
  const std::size_t interval = opt.interval ? opt.interval : 10 * free.size();
  const std::size_t burn = opt.burn_in.value_or(10 * interval);
  Vector delta(def.size());
  // One extra "stay" proposal keeps the chain aperiodic; without it every
  // accepted toggle flips the edge-count parity and near theta = 0 the
  // recorded states are confined to one parity class.
  auto step = [&] {
    const std::size_t pick = rng.below(free.size() + 1);
    if (pick == free.size()) return;
    const auto [i, j] = free[pick];
    change_statistics(g, i, j, def, delta.data());
    const double log_ratio = dot(theta, delta);
    const double u = rng.uniform_pos();
    if (log_ratio >= 0.0 || std::log(u) < log_ratio) {
      g.toggle(i, j);
      for (std::size_t t = 0; t < cur.size(); ++t) cur[t] += delta[t];
    }
  };
  for (std::size_t s = 0; s < burn; ++s) step();
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t s = 0; s < interval; ++s) step();
    std::copy(cur.begin(), cur.end(), out.rows.row(r).begin());
    if (opt.on_record) opt.on_record(g);
  }
  return out;
}

/// Subtracts the column means of `reference` from both matrices.
inline std::pair<Matrix, Matrix> center_by(const Matrix& reference, const Matrix& other) {
  const Vector mu = column_means(reference);
  auto shift = [&](const Matrix& m) {
    Matrix out = m;
    for (std::size_t i = 0; i < out.rows(); ++i)
      for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) -= mu[j];
    return out;
  };
  return {shift(reference), shift(other)};
}

// ---------------------------------------------------------------------------
// Sampled log-likelihood ratio

namespace detail {

inline void check_ratio_inputs(std::span<const double> dtheta, const Matrix& gy, const Matrix& gz, double scale) {
  if (gy.rows() == 0 || gz.rows() == 0) throw std::invalid_argument("loglik ratio: empty sample");
  if (gy.cols() != dtheta.size() || gz.cols() != dtheta.size())
    throw std::invalid_argument("loglik ratio: dimension mismatch");
  if (!(scale > 0.0)) throw std::invalid_argument("loglik ratio: scale must be positive");
}

inline double log_mean_exp_rows(const Matrix& g, std::span<const double> dtheta, double scale, Vector* weights) {
  Vector e(g.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) e[i] = scale * dot(g.row(i), dtheta);
  const double lse = log_sum_exp(e);
  if (weights) {
    weights->resize(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) (*weights)[i] = std::exp(e[i] - lse);
  }
  return lse - std::log(static_cast<double>(g.rows()));
}

}  // namespace detail

/// log mean_j exp(scale gZ_j . dtheta) - log mean_i exp(gY_i . dtheta).
inline double loglik_ratio_hat(std::span<const double> dtheta, const Matrix& gy, const Matrix& gz, double scale = 1.0) {
  detail::check_ratio_inputs(dtheta, gy, gz, scale);
  return detail::log_mean_exp_rows(gz, dtheta, scale, nullptr) - detail::log_mean_exp_rows(gy, dtheta, 1.0, nullptr);
}

inline Vector loglik_ratio_grad(std::span<const double> dtheta, const Matrix& gy, const Matrix& gz, double scale = 1.0) {
  detail::check_ratio_inputs(dtheta, gy, gz, scale);
  Vector wz, wy;
  detail::log_mean_exp_rows(gz, dtheta, scale, &wz);
  detail::log_mean_exp_rows(gy, dtheta, 1.0, &wy);
  Vector grad(dtheta.size(), 0.0);
  for (std::size_t i = 0; i < gz.rows(); ++i)
    for (std::size_t t = 0; t < grad.size(); ++t) grad[t] += scale * wz[i] * gz(i, t);
  for (std::size_t i = 0; i < gy.rows(); ++i)
    for (std::size_t t = 0; t < grad.size(); ++t) grad[t] -= wy[i] * gy(i, t);
  return grad;
}

/// Evaluates the ratio along theta0 + alpha w. Requires w to put some test
/// row strictly beyond every target row (max_j w.gZ_j > max_i w.gY_i), in
/// which case the ratio grows without bound.
inline Vector demonstrate_unbounded(const Matrix& gy, const Matrix& gz, std::span<const double> w,
                                    std::span<const double> alphas) {
  detail::check_ratio_inputs(w, gy, gz, 1.0);
  double max_y = -kInfinity, max_z = -kInfinity;
  for (std::size_t i = 0; i < gy.rows(); ++i) max_y = std::max(max_y, dot(gy.row(i), w));
  for (std::size_t i = 0; i < gz.rows(); ++i) max_z = std::max(max_z, dot(gz.row(i), w));
  if (!(max_z > max_y)) throw std::invalid_argument("demonstrate_unbounded: direction does not separate a test row");
  Vector out;
  out.reserve(alphas.size());
  for (double a : alphas) out.push_back(loglik_ratio_hat(scaled(w, a), gy, gz, 1.0));
  return out;
}

/// Turns an exterior normal z (1 + gY_i.z >= 0 for all i, 1 + gZ_j.z < 0 for
/// some j, centered coordinates) into an ascent direction w = -c z. The ratio
/// along alpha w lies within [alpha gap - log s, alpha gap + log r], where
/// gap = max_j w.gZ_j - max_i w.gY_i, so c is chosen to make gap exceed
/// log(r s) + 1; the ratio then strictly increases from alpha to 2 alpha for
/// every alpha >= 1.
inline Vector unbounded_direction(const Matrix& gy, const Matrix& gz, std::span<const double> normal) {
  detail::check_ratio_inputs(normal, gy, gz, 1.0);
  Vector w(normal.begin(), normal.end());
  for (double& x : w) x = -x;
  double max_y = -kInfinity, max_z = -kInfinity;
  for (std::size_t i = 0; i < gy.rows(); ++i) max_y = std::max(max_y, dot(gy.row(i), w));
  for (std::size_t i = 0; i < gz.rows(); ++i) max_z = std::max(max_z, dot(gz.row(i), w));
  const double gap = max_z - max_y;
  if (!(gap > 0.0)) throw std::invalid_argument("unbounded_direction: normal does not separate a test row");
  const double need = std::log(static_cast<double>(gy.rows()) * static_cast<double>(gz.rows())) + 1.0;
  const double c = std::max(1.0, need / gap);
  for (double& x : w) x *= c;
  return w;
}

}  // namespace hullmle
