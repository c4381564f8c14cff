#pragma once

// Dense two-phase revised simplex for
//
//   minimize / maximize  c^T x
//   subject to           a_i^T x  {>=, <=, =}  b_i
//                        lower <= x <= upper        (entries may be infinite)
//
// Each row i gets a logical variable w_i = a_i^T x whose bounds encode the row
// sense, so the working system is A x - w = 0 with every variable boxed.
// Free structurals are handled directly by the bounded-variable method.
//
// The basis is never formed as an m x m matrix. Let S be the basic
// structurals and L the rows whose logical is nonbasic; |S| == |L| always.
// Every solve with the basis reduces to the k x k kernel K = A[L, S], so the
// work per iteration is O(k * (m + n) + k^3) with k <= min(m, n). That keeps
// both tall problems (many rows, few variables) and wide ones cheap.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hullmle/numerics.hpp"

namespace hullmle {

/// Snapshot handed to SolverConfig::observer after every simplex iteration.
struct IterateInfo {
  int phase;                        // 1 or 2
  std::size_t iteration;
  double objective;                 // in the caller's sense; meaningful in phase 2
  std::span<const double> primal;   // structural values
};

struct SolverConfig {
  double feas_tol = 1e-7;       // absolute residual accepted on constraints
  double pivot_tol = 1e-9;      // smaller pivots are rejected
  double opt_tol = 1e-9;        // reduced-cost threshold, scaled by max |c|
  double boundary_tol = 1e-7;   // hull status: |gamma - 1| <= tol * (1 + |gamma|)
  double duality_tol = 1e-7;    // primal/dual gap: tol * (1 + |objective|)
  std::size_t max_iterations = 0;  // 0 selects 50 * (m + n)
  std::function<void(const IterateInfo&)> observer;

  void validate() const {
    if (!(feas_tol > 0 && pivot_tol > 0 && opt_tol > 0 && boundary_tol > 0 && duality_tol > 0))
      throw std::invalid_argument("SolverConfig: tolerances must be strictly positive");
  }
};

namespace lp {

enum class Objective { Minimize, Maximize };
enum class RowSense { GreaterEqual, LessEqual, Equal };
enum class Status { Optimal, Unbounded, Infeasible };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Unbounded: return "unbounded";
    case Status::Infeasible: return "infeasible";
  }
  return "unknown";
}

struct LinearProgram {
  Objective sense = Objective::Minimize;
  Vector objective;
  Matrix constraints;  // m x n
  std::vector<RowSense> row_senses;
  Vector rhs;
  Vector lower;  // empty: every variable unbounded below
  Vector upper;  // empty: every variable unbounded above

  std::size_t num_variables() const noexcept { return objective.size(); }
  std::size_t num_constraints() const noexcept { return row_senses.size(); }

  double lower_bound(std::size_t j) const { return lower.empty() ? -kInfinity : lower[j]; }
  double upper_bound(std::size_t j) const { return upper.empty() ? kInfinity : upper[j]; }

  void validate() const {
    const std::size_t n = num_variables();
    const std::size_t m = num_constraints();
    if (n == 0) throw std::invalid_argument("LinearProgram: no variables");
    if (m > 0 && (constraints.rows() != m || constraints.cols() != n))
      throw std::invalid_argument("LinearProgram: constraint matrix is not " + std::to_string(m) + "x" +
                                  std::to_string(n));
    if (rhs.size() != m) throw std::invalid_argument("LinearProgram: rhs length mismatch");
    if (!lower.empty() && lower.size() != n) throw std::invalid_argument("LinearProgram: lower bound length mismatch");
    if (!upper.empty() && upper.size() != n) throw std::invalid_argument("LinearProgram: upper bound length mismatch");
    if (!all_finite(objective) || !all_finite(rhs) || (m > 0 && !all_finite(constraints)))
      throw std::invalid_argument("LinearProgram: non-finite data");
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = lower_bound(j), hi = upper_bound(j);
      if (std::isnan(lo) || std::isnan(hi) || lo == kInfinity || hi == -kInfinity || lo > hi)
        throw std::invalid_argument("LinearProgram: invalid bounds for variable " + std::to_string(j));
    }
  }
};

struct LpSolution {
  Status status = Status::Infeasible;
  Vector primal;      // Optimal only
  double objective_value = std::numeric_limits<double>::quiet_NaN();  // Optimal only
  Vector row_duals;   // Optimal only; multipliers for the caller's sense
  Vector ray;         // Unbounded only: improving recession direction
  std::size_t iterations = 0;

  bool optimal() const noexcept { return status == Status::Optimal; }
};

/// Thrown when the iteration cap is hit. Indicates numerical trouble rather
/// than a property of the problem, so it is not an LpSolution status.
class IterationLimitError : public std::runtime_error {
 public:
  explicit IterationLimitError(std::size_t limit)
      : std::runtime_error("simplex iteration limit reached (" + std::to_string(limit) + ")") {}
};

namespace detail {

class SimplexSolver {
 public:
  SimplexSolver(const LinearProgram& lp, const SolverConfig& cfg)
      : lp_(lp), cfg_(cfg), a_(lp.constraints), m_(lp.num_constraints()), n_(lp.num_variables()) {}

  LpSolution run() {
    setup();
    const std::size_t limit = cfg_.max_iterations ? cfg_.max_iterations : 50 * (m_ + n_);
    const std::size_t bland_after = 3 * (m_ + n_);
    std::size_t degenerate_run = 0;
    bool relaxed_feasibility = false;
    std::vector<char> cleanup_tried(n_, 0);

    for (;;) {
      if (iterations_ % 64 == 0) recompute_primal();
      const double infeas = infeasibility(relaxed_feasibility ? cfg_.feas_tol : 0.0);
      const int phase = infeas > 0.0 ? 1 : 2;
      phase_costs(phase, relaxed_feasibility ? cfg_.feas_tol : 0.0);
      compute_duals();

      const bool bland = degenerate_run >= bland_after;
      auto [entering, dir] = choose_entering(bland);

      if (entering < 0) {
        if (phase == 1) {
          if (infeas > cfg_.feas_tol) return finish(Status::Infeasible);
          relaxed_feasibility = true;
          continue;
        }
        // Optimal. Try to make remaining free structurals basic so the
        // reported point is a vertex whenever one exists.
        bool pivoted = false;
        for (std::size_t j = 0; j < n_ && !pivoted; ++j) {
          if (state_[j] != VarState::Free || cleanup_tried[j]) continue;
          cleanup_tried[j] = 1;
          for (int d : {+1, -1}) {
            compute_direction(static_cast<std::ptrdiff_t>(j), d);
            const Ratio r = ratio_test(static_cast<std::ptrdiff_t>(j), d, 2, false);
            if (r.leaving >= 0) {
              apply_step(static_cast<std::ptrdiff_t>(j), d, r);
              pivoted = true;
              break;
            }
          }
        }
        if (pivoted) {
          bump_iterations(limit);
          continue;
        }
        return finish(Status::Optimal);
      }

      compute_direction(entering, dir);
      const Ratio r = ratio_test(entering, dir, phase, bland);
      if (r.unbounded) {
        if (phase == 2) return finish_unbounded(entering, dir);
        throw std::runtime_error("simplex: unbounded phase-1 ray (numerical breakdown)");
      }
      apply_step(entering, dir, r);
      degenerate_run = r.step <= 1e-12 ? degenerate_run + 1 : 0;
      bump_iterations(limit);
      notify(phase);
    }
  }

 private:
  enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, Free };

  struct Ratio {
    double step = 0.0;
    std::ptrdiff_t leaving = -1;  // -1: bound flip of the entering variable
    bool leaving_to_upper = false;
    bool unbounded = false;
  };

  // --- setup ---------------------------------------------------------------

  void setup() {
    lp_.validate();
    cfg_.validate();
    const std::size_t total = n_ + m_;
    lb_.assign(total, -kInfinity);
    ub_.assign(total, kInfinity);
    cost_.assign(n_, 0.0);
    const double sign = lp_.sense == Objective::Maximize ? -1.0 : 1.0;
    cost_scale_ = 1.0;
    for (std::size_t j = 0; j < n_; ++j) {
      cost_[j] = sign * lp_.objective[j];
      cost_scale_ = std::max(cost_scale_, std::abs(cost_[j]));
      lb_[j] = lp_.lower_bound(j);
      ub_[j] = lp_.upper_bound(j);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const double b = lp_.rhs[i];
      switch (lp_.row_senses[i]) {
        case RowSense::GreaterEqual: lb_[n_ + i] = b; break;
        case RowSense::LessEqual: ub_[n_ + i] = b; break;
        case RowSense::Equal: lb_[n_ + i] = ub_[n_ + i] = b; break;
      }
    }
    state_.assign(total, VarState::Basic);
    x_.assign(total, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lb_[j])) {
        state_[j] = VarState::AtLower;
        x_[j] = lb_[j];
      } else if (std::isfinite(ub_[j])) {
        state_[j] = VarState::AtUpper;
        x_[j] = ub_[j];
      } else {
        state_[j] = VarState::Free;
      }
    }
    basic_cols_.clear();
    kernel_rows_.clear();
    pos_in_s_.assign(n_, -1);
    pos_in_l_.assign(m_, -1);
    phase_cost_.assign(total, 0.0);
    y_.assign(m_, 0.0);
    dw_.assign(m_, 0.0);
    factor();
    recompute_primal();
  }

  // --- basis bookkeeping ----------------------------------------------------

  std::size_t k() const noexcept { return basic_cols_.size(); }

  void factor() {
    const std::size_t kk = k();
    if (kk == 0) {
      kernel_ = LuDecomposition();
      return;
    }
    Matrix kmat(kk, kk);
    for (std::size_t r = 0; r < kk; ++r) {
      auto arow = a_.row(kernel_rows_[r]);
      for (std::size_t c = 0; c < kk; ++c) kmat(r, c) = arow[basic_cols_[c]];
    }
    kernel_.factor(std::move(kmat), 1e-14);
    if (kernel_.singular()) throw std::runtime_error("simplex: basis kernel became singular");
  }

  void recompute_primal() {
    const std::size_t kk = k();
    if (kk > 0) {
      Vector rhs(kk);
      for (std::size_t r = 0; r < kk; ++r) {
        const std::size_t i = kernel_rows_[r];
        auto arow = a_.row(i);
        double s = x_[n_ + i];
        for (std::size_t j = 0; j < n_; ++j)
          if (state_[j] != VarState::Basic) s -= arow[j] * x_[j];
        rhs[r] = s;
      }
      const Vector xs = kernel_.solve(rhs);
      for (std::size_t c = 0; c < kk; ++c) x_[basic_cols_[c]] = xs[c];
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (state_[n_ + i] != VarState::Basic) continue;
      auto arow = a_.row(i);
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) s += arow[j] * x_[j];
      x_[n_ + i] = s;
    }
  }

  static double primal_tol(std::size_t, double bound) {
    return 1e-9 * (1.0 + std::abs(bound));
  }

  // Sum of bound violations over basic variables beyond max(extra, primal_tol).
  double infeasibility(double extra) const {
    double total = 0.0;
    auto visit = [&](std::size_t j) {
      const double v = x_[j];
      if (v < lb_[j] - std::max(extra, primal_tol(j, lb_[j]))) total += lb_[j] - v;
      else if (v > ub_[j] + std::max(extra, primal_tol(j, ub_[j]))) total += v - ub_[j];
    };
    for (std::size_t j : basic_cols_) visit(j);
    for (std::size_t i = 0; i < m_; ++i)
      if (state_[n_ + i] == VarState::Basic) visit(n_ + i);
    return total;
  }

  bool below(std::size_t j, double extra) const {
    return x_[j] < lb_[j] - std::max(extra, primal_tol(j, lb_[j]));
  }
  bool above(std::size_t j, double extra) const {
    return x_[j] > ub_[j] + std::max(extra, primal_tol(j, ub_[j]));
  }

  void phase_costs(int phase, double extra) {
    phase_ = phase;
    std::fill(phase_cost_.begin(), phase_cost_.end(), 0.0);
    if (phase == 2) {
      for (std::size_t j = 0; j < n_; ++j) phase_cost_[j] = cost_[j];
      return;
    }
    auto assign = [&](std::size_t j) {
      if (below(j, extra)) phase_cost_[j] = -1.0;
      else if (above(j, extra)) phase_cost_[j] = 1.0;
    };
    for (std::size_t j : basic_cols_) assign(j);
    for (std::size_t i = 0; i < m_; ++i)
      if (state_[n_ + i] == VarState::Basic) assign(n_ + i);
  }

  // Row multipliers y with y^T B = c_B for the current phase costs.
  void compute_duals() {
    std::fill(y_.begin(), y_.end(), 0.0);
    priced_rows_.clear();
    for (std::size_t i = 0; i < m_; ++i) {
      if (state_[n_ + i] == VarState::Basic && phase_cost_[n_ + i] != 0.0) {
        y_[i] = -phase_cost_[n_ + i];
        priced_rows_.push_back(i);
      }
    }
    const std::size_t kk = k();
    if (kk > 0) {
      Vector rhs(kk);
      for (std::size_t c = 0; c < kk; ++c) {
        const std::size_t j = basic_cols_[c];
        double s = phase_cost_[j];
        for (std::size_t i : priced_rows_) s -= y_[i] * a_(i, j);
        rhs[c] = s;
      }
      const Vector yl = kernel_.solve_transpose(rhs);
      for (std::size_t r = 0; r < kk; ++r) {
        y_[kernel_rows_[r]] = yl[r];
        priced_rows_.push_back(kernel_rows_[r]);
      }
    }
  }

  double reduced_cost(std::size_t j) const {
    if (j >= n_) return phase_cost_[j] + y_[j - n_];
    double d = phase_cost_[j];
    for (std::size_t i : priced_rows_) d -= y_[i] * a_(i, j);
    return d;
  }

  std::pair<std::ptrdiff_t, int> choose_entering(bool bland) const {
    const double tol = cfg_.opt_tol * (phase_ == 1 ? 1.0 : cost_scale_);
    std::ptrdiff_t best = -1;
    int best_dir = 0;
    double best_score = 0.0;
    auto consider = [&](std::size_t j) -> bool {
      if (state_[j] == VarState::Basic) return false;
      if (lb_[j] == ub_[j]) return false;
      const double d = reduced_cost(j);
      int dir = 0;
      switch (state_[j]) {
        case VarState::AtLower: if (d < -tol) dir = +1; break;
        case VarState::AtUpper: if (d > tol) dir = -1; break;
        case VarState::Free: if (std::abs(d) > tol) dir = d < 0 ? +1 : -1; break;
        case VarState::Basic: break;
      }
      if (dir == 0) return false;
      if (bland) {
        best = static_cast<std::ptrdiff_t>(j);
        best_dir = dir;
        return true;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        best = static_cast<std::ptrdiff_t>(j);
        best_dir = dir;
      }
      return false;
    };
    for (std::size_t j = 0; j < n_; ++j)
      if (consider(j)) return {best, best_dir};
    // Nonbasic logicals are exactly the kernel rows; Bland needs index order.
    if (bland) {
      std::vector<std::size_t> rows(kernel_rows_.begin(), kernel_rows_.end());
      std::sort(rows.begin(), rows.end());
      for (std::size_t i : rows)
        if (consider(n_ + i)) return {best, best_dir};
    } else {
      for (std::size_t i : kernel_rows_) consider(n_ + i);
    }
    return {best, best_dir};
  }

  // Change of every basic variable per unit move of `entering` along `dir`.
  void compute_direction(std::ptrdiff_t entering, int dir) {
    const std::size_t kk = k();
    const std::size_t q = static_cast<std::size_t>(entering);
    ds_.assign(kk, 0.0);
    if (kk > 0) {
      Vector rhs(kk, 0.0);
      if (q < n_) {
        for (std::size_t r = 0; r < kk; ++r) rhs[r] = -dir * a_(kernel_rows_[r], q);
      } else {
        rhs[static_cast<std::size_t>(pos_in_l_[q - n_])] = dir;
      }
      ds_ = kernel_.solve(rhs);
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (state_[n_ + i] != VarState::Basic) {
        dw_[i] = 0.0;
        continue;
      }
      auto arow = a_.row(i);
      double s = q < n_ ? dir * arow[q] : 0.0;
      for (std::size_t c = 0; c < kk; ++c) s += arow[basic_cols_[c]] * ds_[c];
      dw_[i] = s;
    }
  }

  Ratio ratio_test(std::ptrdiff_t entering, int, int phase, bool bland) const {
    const std::size_t q = static_cast<std::size_t>(entering);
    const double own = (std::isfinite(lb_[q]) && std::isfinite(ub_[q])) ? ub_[q] - lb_[q] : kInfinity;
    const double extra = 0.0;

    // limit(j, delta, relax): step at which basic j reaches its blocking
    // bound, or +inf when it does not block.
    auto limit = [&](std::size_t j, double delta, double relax) -> double {
      const double v = x_[j];
      if (delta > 0.0) {
        if (phase == 1 && below(j, extra)) return (lb_[j] - v) / delta;
        if (phase == 1 && above(j, extra)) return kInfinity;
        if (!std::isfinite(ub_[j])) return kInfinity;
        return std::max(0.0, (ub_[j] + relax - v) / delta);
      }
      if (phase == 1 && above(j, extra)) return (ub_[j] - v) / delta;
      if (phase == 1 && below(j, extra)) return kInfinity;
      if (!std::isfinite(lb_[j])) return kInfinity;
      return std::max(0.0, (lb_[j] - relax - v) / delta);
    };

    auto for_each_basic = [&](auto&& fn) {
      for (std::size_t c = 0; c < k(); ++c) fn(basic_cols_[c], ds_[c]);
      for (std::size_t i = 0; i < m_; ++i)
        if (state_[n_ + i] == VarState::Basic) fn(n_ + i, dw_[i]);
    };

    if (bland) {
      double best = kInfinity;
      std::ptrdiff_t who = -1;
      double who_delta = 0.0;
      for_each_basic([&](std::size_t j, double delta) {
        if (std::abs(delta) <= cfg_.pivot_tol) return;
        const double t = limit(j, delta, 0.0);
        const double eps = 1e-15 * (1.0 + std::abs(t));
        const bool tie = who >= 0 && std::abs(t - best) <= eps && j < static_cast<std::size_t>(who);
        if (t < best - eps || tie) {
          best = std::min(best, t);
          who = static_cast<std::ptrdiff_t>(j);
          who_delta = delta;
        }
      });
      return make_ratio(own, best, who, who_delta, phase);
    }

    // Harris two-pass: bound the step with slightly relaxed bounds, then
    // pick the largest pivot among candidates within that bound.
    double relaxed = kInfinity;
    for_each_basic([&](std::size_t j, double delta) {
      if (std::abs(delta) <= cfg_.pivot_tol) return;
      relaxed = std::min(relaxed, limit(j, delta, primal_tol(j, delta > 0 ? ub_[j] : lb_[j])));
    });
    std::ptrdiff_t who = -1;
    double who_delta = 0.0;
    double who_step = kInfinity;
    if (std::isfinite(relaxed)) {
      for_each_basic([&](std::size_t j, double delta) {
        if (std::abs(delta) <= cfg_.pivot_tol) return;
        const double t = limit(j, delta, 0.0);
        if (t <= relaxed && std::abs(delta) > std::abs(who_delta)) {
          who = static_cast<std::ptrdiff_t>(j);
          who_delta = delta;
          who_step = t;
        }
      });
    }
    return make_ratio(own, who_step, who, who_delta, phase);
  }

  Ratio make_ratio(double own, double step, std::ptrdiff_t who, double delta, int phase) const {
    Ratio out;
    if (who < 0 && !std::isfinite(own)) {
      out.unbounded = true;
      return out;
    }
    if (who < 0 || own <= step) {
      out.step = own;
      out.leaving = -1;
      return out;
    }
    out.step = step;
    out.leaving = who;
    const std::size_t j = static_cast<std::size_t>(who);
    if (phase == 1 && below(j, 0.0)) out.leaving_to_upper = false;
    else if (phase == 1 && above(j, 0.0)) out.leaving_to_upper = true;
    else out.leaving_to_upper = delta > 0.0;
    return out;
  }

  void apply_step(std::ptrdiff_t entering, int dir, const Ratio& r) {
    const std::size_t q = static_cast<std::size_t>(entering);
    const double t = r.step;
    x_[q] += dir * t;
    for (std::size_t c = 0; c < k(); ++c) x_[basic_cols_[c]] += t * ds_[c];
    for (std::size_t i = 0; i < m_; ++i)
      if (state_[n_ + i] == VarState::Basic) x_[n_ + i] += t * dw_[i];

    if (r.leaving < 0) {
      // Bound flip; basis unchanged.
      if (dir > 0) {
        x_[q] = ub_[q];
        state_[q] = VarState::AtUpper;
      } else {
        x_[q] = lb_[q];
        state_[q] = VarState::AtLower;
      }
      return;
    }

    const std::size_t out = static_cast<std::size_t>(r.leaving);
    x_[out] = r.leaving_to_upper ? ub_[out] : lb_[out];
    const bool leaving_structural = out < n_;
    const bool entering_structural = q < n_;

    if (entering_structural && leaving_structural) {
      const auto c = static_cast<std::size_t>(pos_in_s_[out]);
      basic_cols_[c] = q;
      pos_in_s_[q] = static_cast<std::ptrdiff_t>(c);
      pos_in_s_[out] = -1;
    } else if (entering_structural) {
      const std::size_t row = out - n_;
      pos_in_s_[q] = static_cast<std::ptrdiff_t>(basic_cols_.size());
      basic_cols_.push_back(q);
      pos_in_l_[row] = static_cast<std::ptrdiff_t>(kernel_rows_.size());
      kernel_rows_.push_back(row);
    } else if (leaving_structural) {
      const auto c = static_cast<std::size_t>(pos_in_s_[out]);
      const auto r_pos = static_cast<std::size_t>(pos_in_l_[q - n_]);
      erase_at(basic_cols_, pos_in_s_, c, 0);
      erase_at(kernel_rows_, pos_in_l_, r_pos, 0);
      pos_in_s_[out] = -1;
      pos_in_l_[q - n_] = -1;
    } else {
      const auto r_pos = static_cast<std::size_t>(pos_in_l_[q - n_]);
      const std::size_t row = out - n_;
      kernel_rows_[r_pos] = row;
      pos_in_l_[row] = static_cast<std::ptrdiff_t>(r_pos);
      pos_in_l_[q - n_] = -1;
    }
    state_[q] = VarState::Basic;
    state_[out] = lb_[out] == ub_[out] ? VarState::AtLower
                  : r.leaving_to_upper ? VarState::AtUpper
                                       : VarState::AtLower;
    factor();
  }

  static void erase_at(std::vector<std::size_t>& list, std::vector<std::ptrdiff_t>& pos, std::size_t at,
                       std::size_t offset) {
    list.erase(list.begin() + static_cast<std::ptrdiff_t>(at));
    for (std::size_t p = at; p < list.size(); ++p) pos[list[p] - offset] = static_cast<std::ptrdiff_t>(p);
  }

  void bump_iterations(std::size_t limit) {
    if (++iterations_ > limit) throw IterationLimitError(limit);
  }

  double user_objective() const {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += lp_.objective[j] * x_[j];
    return s;
  }

  void notify(int phase) {
    if (!cfg_.observer) return;
    cfg_.observer(IterateInfo{phase, iterations_, user_objective(), std::span<const double>(x_.data(), n_)});
  }

  LpSolution finish(Status status) {
    LpSolution sol;
    sol.status = status;
    sol.iterations = iterations_;
    if (status != Status::Optimal) return sol;
    recompute_primal();
    phase_costs(2, 0.0);
    compute_duals();
    sol.primal.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
    sol.objective_value = user_objective();
    const double sign = lp_.sense == Objective::Maximize ? -1.0 : 1.0;
    sol.row_duals = y_;
    for (double& v : sol.row_duals) v *= sign;
    return sol;
  }

  LpSolution finish_unbounded(std::ptrdiff_t entering, int dir) {
    LpSolution sol;
    sol.status = Status::Unbounded;
    sol.iterations = iterations_;
    sol.ray.assign(n_, 0.0);
    const std::size_t q = static_cast<std::size_t>(entering);
    if (q < n_) sol.ray[q] = dir;
    for (std::size_t c = 0; c < k(); ++c) sol.ray[basic_cols_[c]] = ds_[c];
    return sol;
  }

  const LinearProgram& lp_;
  SolverConfig cfg_;
  const Matrix& a_;
  std::size_t m_, n_;

  Vector lb_, ub_, cost_, x_, phase_cost_, y_, ds_, dw_;
  double cost_scale_ = 1.0;
  int phase_ = 2;
  std::vector<VarState> state_;
  std::vector<std::size_t> basic_cols_, kernel_rows_, priced_rows_;
  std::vector<std::ptrdiff_t> pos_in_s_, pos_in_l_;
  LuDecomposition kernel_;
  std::size_t iterations_ = 0;
};

}  // namespace detail

/// Solves the program. Throws IterationLimitError on the iteration cap and
/// std::invalid_argument on malformed input.
inline LpSolution solve(const LinearProgram& problem, const SolverConfig& config = {}) {
  return detail::SimplexSolver(problem, config).run();
}

/// For a primal  min c^T z  s.t.  A z >= b, z free  builds the dual
/// max b^T y  s.t.  A^T y = c, y >= 0.
inline LinearProgram dual_of(const LinearProgram& primal) {
  primal.validate();
  if (primal.sense != Objective::Minimize) throw std::invalid_argument("dual_of: primal must be a minimization");
  for (auto s : primal.row_senses)
    if (s != RowSense::GreaterEqual) throw std::invalid_argument("dual_of: primal rows must all be >=");
  for (std::size_t j = 0; j < primal.num_variables(); ++j)
    if (std::isfinite(primal.lower_bound(j)) || std::isfinite(primal.upper_bound(j)))
      throw std::invalid_argument("dual_of: primal variables must be free");
  const std::size_t m = primal.num_constraints();
  LinearProgram dual;
  dual.sense = Objective::Maximize;
  dual.objective = primal.rhs;
  dual.constraints = primal.constraints.transpose();
  dual.row_senses.assign(primal.num_variables(), RowSense::Equal);
  dual.rhs = primal.objective;
  dual.lower.assign(m, 0.0);
  dual.upper.assign(m, kInfinity);
  return dual;
}

/// Solves a primal of the shape accepted by dual_of together with its dual.
inline std::pair<LpSolution, LpSolution> solve_dual_pair(const LinearProgram& primal,
                                                         const SolverConfig& config = {}) {
  const LinearProgram dual = dual_of(primal);
  return {solve(primal, config), solve(dual, config)};
}

}  // namespace lp
}  // namespace hullmle
