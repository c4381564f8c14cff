#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

#include "hullmle/lp.hpp"
#include "hullmle/random.hpp"
#include "support/lp_oracle.hpp"

using namespace hullmle;
using namespace hullmle::lp;

namespace {

LinearProgram make(Objective sense, Vector c, std::vector<Vector> rows, std::vector<RowSense> senses, Vector rhs,
                   Vector lo = {}, Vector hi = {}) {
  LinearProgram p;
  p.sense = sense;
  p.objective = std::move(c);
  p.constraints = rows.empty() ? Matrix() : Matrix::from_rows(rows);
  p.row_senses = std::move(senses);
  p.rhs = std::move(rhs);
  p.lower = std::move(lo);
  p.upper = std::move(hi);
  return p;
}

double residual(const LinearProgram& p, const Vector& x) {
  double worst = 0;
  for (std::size_t i = 0; i < p.num_constraints(); ++i) {
    const double s = dot(p.constraints.row(i), x);
    switch (p.row_senses[i]) {
      case RowSense::GreaterEqual: worst = std::max(worst, p.rhs[i] - s); break;
      case RowSense::LessEqual: worst = std::max(worst, s - p.rhs[i]); break;
      case RowSense::Equal: worst = std::max(worst, std::abs(s - p.rhs[i])); break;
    }
  }
  for (std::size_t j = 0; j < p.num_variables(); ++j) {
    worst = std::max(worst, p.lower_bound(j) - x[j]);
    worst = std::max(worst, x[j] - p.upper_bound(j));
  }
  return worst;
}

std::vector<oracle::Halfspace> halfspaces(const LinearProgram& p) {
  std::vector<oracle::Halfspace> out;
  const std::size_t n = p.num_variables();
  for (std::size_t i = 0; i < p.num_constraints(); ++i) {
    const int s = p.row_senses[i] == RowSense::GreaterEqual ? 1 : p.row_senses[i] == RowSense::LessEqual ? -1 : 0;
    out.push_back({p.constraints.row_vector(i), p.rhs[i], s});
  }
  for (std::size_t j = 0; j < n; ++j) {
    Vector e(n, 0.0);
    e[j] = 1;
    if (std::isfinite(p.lower_bound(j))) out.push_back({e, p.lower_bound(j), 1});
    if (std::isfinite(p.upper_bound(j))) out.push_back({e, p.upper_bound(j), -1});
  }
  return out;
}

}  // namespace

TEST(Lp, TextbookMaximization) {
  const auto p = make(Objective::Maximize, {3, 5}, {{1, 0}, {0, 2}, {3, 2}},
                      {RowSense::LessEqual, RowSense::LessEqual, RowSense::LessEqual}, {4, 12, 18}, {0, 0}, {});
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective_value, 36.0, 1e-9);
  EXPECT_NEAR(s.primal[0], 2.0, 1e-9);
  EXPECT_NEAR(s.primal[1], 6.0, 1e-9);
}

TEST(Lp, BealeCyclingExampleTerminates) {
  const auto p = make(Objective::Minimize, {-0.75, 150, -0.02, 6},
                      {{0.25, -60, -0.04, 9}, {0.5, -90, -0.02, 3}, {0, 0, 1, 0}},
                      {RowSense::LessEqual, RowSense::LessEqual, RowSense::LessEqual}, {0, 0, 1}, {0, 0, 0, 0}, {});
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective_value, -0.05, 1e-9);
}

TEST(Lp, DetectsInfeasible) {
  const auto p = make(Objective::Minimize, {1}, {{1}, {1}}, {RowSense::GreaterEqual, RowSense::LessEqual}, {1, 0});
  EXPECT_EQ(solve(p).status, Status::Infeasible);
  const auto q = make(Objective::Minimize, {1, 1}, {{1, 1}}, {RowSense::Equal}, {5}, {0, 0}, {2, 2});
  EXPECT_EQ(solve(q).status, Status::Infeasible);
}

TEST(Lp, DetectsUnboundedWithRay) {
  const auto p = make(Objective::Minimize, {-1, 0}, {{1, -1}}, {RowSense::LessEqual}, {1}, {0, 0}, {});
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::Unbounded);
  ASSERT_EQ(s.ray.size(), 2u);
  EXPECT_LT(dot(p.objective, s.ray), 0.0);
  EXPECT_LE(s.ray[0] - s.ray[1], 1e-12);
  EXPECT_GE(s.ray[0], 0.0);
  EXPECT_GE(s.ray[1], 0.0);
}

TEST(Lp, FreeVariablesTriangleQuery) {
  // minimize 3 z1 + 2 z2 subject to v . z >= -1 over a triangle's vertices
  const auto p = make(Objective::Minimize, {3, 2}, {{-1, 0}, {2, 1}, {1, -1}},
                      {RowSense::GreaterEqual, RowSense::GreaterEqual, RowSense::GreaterEqual}, {-1, -1, -1});
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective_value, -3.0, 1e-9);
  EXPECT_NEAR(s.primal[0], 1.0, 1e-9);
  EXPECT_NEAR(s.primal[1], -3.0, 1e-9);
  // complementary slackness: row 3 is slack, so its multiplier vanishes
  EXPECT_NEAR(s.row_duals[2], 0.0, 1e-12);
  EXPECT_GE(s.row_duals[0], -1e-12);
  EXPECT_GE(s.row_duals[1], -1e-12);
}

TEST(Lp, EqualityRowsAndDuals) {
  // max -y1 - y2 - y3 s.t. sum_i y_i v_i = p, y >= 0 (the dual of the query above)
  const auto p = make(Objective::Maximize, {-1, -1, -1}, {{-1, 2, 1}, {0, 1, -1}}, {RowSense::Equal, RowSense::Equal},
                      {3, 2}, {0, 0, 0}, {});
  const auto s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective_value, -3.0, 1e-9);
  EXPECT_LT(residual(p, s.primal), 1e-9);
}

TEST(Lp, DualPairAgrees) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t d = 2 + trial % 4;
    const std::size_t m = d + 3 + trial % 7;
    LinearProgram p;
    p.sense = Objective::Minimize;
    p.constraints = Matrix(m, d);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < d; ++j) p.constraints(i, j) = rng.normal();
    p.objective.resize(d);
    for (auto& v : p.objective) v = rng.normal();
    p.row_senses.assign(m, RowSense::GreaterEqual);
    p.rhs.assign(m, -1.0);
    const auto [primal, dual] = solve_dual_pair(p);
    if (primal.status == Status::Optimal) {
      ASSERT_EQ(dual.status, Status::Optimal);
      EXPECT_NEAR(primal.objective_value, dual.objective_value, 1e-8 * (1 + std::abs(primal.objective_value)));
      EXPECT_LT(residual(p, primal.primal), 1e-9);
      for (std::size_t i = 0; i < m; ++i) EXPECT_NEAR(primal.row_duals[i], dual.primal[i], 1e-7);
    } else {
      EXPECT_EQ(primal.status, Status::Unbounded);
      EXPECT_EQ(dual.status, Status::Infeasible);
    }
  }
}

TEST(Lp, RandomBoxedProblemsMatchVertexEnumeration) {
  Rng rng(17);
  int feasible = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const std::size_t m = 1 + (trial / 4) % 4;
    LinearProgram p;
    p.sense = trial % 2 ? Objective::Maximize : Objective::Minimize;
    p.objective.resize(n);
    for (auto& v : p.objective) v = std::round(rng.normal() * 3);
    p.constraints = Matrix(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) p.constraints(i, j) = std::round(rng.normal() * 2);
    for (std::size_t i = 0; i < m; ++i) {
      const auto r = rng.below(5);
      p.row_senses.push_back(r < 2 ? RowSense::GreaterEqual : r < 4 ? RowSense::LessEqual : RowSense::Equal);
      p.rhs.push_back(std::round(rng.normal() * 3));
    }
    p.lower.resize(n);
    p.upper.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      p.lower[j] = -static_cast<double>(rng.below(4));
      p.upper[j] = p.lower[j] + static_cast<double>(rng.below(5));
    }
    Vector c = p.objective;
    if (p.sense == Objective::Maximize)
      for (auto& v : c) v = -v;
    const auto ref = oracle::enumerate_vertices(c, halfspaces(p));
    const auto s = solve(p);
    if (!ref.feasible) {
      EXPECT_EQ(s.status, Status::Infeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ++feasible;
    ASSERT_EQ(s.status, Status::Optimal) << "trial " << trial;
    const double expect = p.sense == Objective::Maximize ? -ref.value : ref.value;
    EXPECT_NEAR(s.objective_value, expect, 1e-8) << "trial " << trial;
    EXPECT_LT(residual(p, s.primal), 1e-8) << "trial " << trial;
  }
  EXPECT_GT(feasible, 50);
  EXPECT_GT(infeasible, 10);
}

TEST(Lp, ObserverSeesMonotonePhaseTwoObjective) {
  Rng rng(23);
  const std::size_t m = 60, d = 5;
  LinearProgram p;
  p.constraints = Matrix(m, d);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) p.constraints(i, j) = rng.normal();
  p.objective = {1, 0.5, -0.2, 0.1, 0.3};
  p.row_senses.assign(m, RowSense::GreaterEqual);
  p.rhs.assign(m, -1.0);
  std::vector<double> trace;
  SolverConfig cfg;
  cfg.observer = [&](const IterateInfo& info) {
    if (info.phase == 2) trace.push_back(info.objective);
  };
  const auto s = solve(p, cfg);
  ASSERT_EQ(s.status, Status::Optimal);
  ASSERT_FALSE(trace.empty());
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-9);
  for (double v : trace) EXPECT_GE(v, s.objective_value - 1e-9);
}

TEST(Lp, IterationLimitThrows) {
  const auto p = make(Objective::Maximize, {3, 5}, {{1, 0}, {0, 2}, {3, 2}},
                      {RowSense::LessEqual, RowSense::LessEqual, RowSense::LessEqual}, {4, 12, 18}, {0, 0}, {});
  SolverConfig cfg;
  cfg.max_iterations = 1;
  EXPECT_THROW(solve(p, cfg), IterationLimitError);
}

TEST(Lp, RejectsMalformedInput) {
  auto p = make(Objective::Minimize, {1, 1}, {{1, 1}}, {RowSense::GreaterEqual}, {1, 2});
  EXPECT_THROW(solve(p), std::invalid_argument);
  p.rhs = {1};
  p.lower = {0, 0};
  p.upper = {-1, 1};
  EXPECT_THROW(solve(p), std::invalid_argument);
  p.upper = {1, 1};
  p.objective[0] = std::nan("");
  EXPECT_THROW(solve(p), std::invalid_argument);
  SolverConfig bad;
  bad.feas_tol = 0;
  p.objective[0] = 1;
  EXPECT_THROW(solve(p, bad), std::invalid_argument);
}

TEST(Lp, TallAndWideProblemsAreFast) {
  Rng rng(29);
  const std::size_t m = 20000, d = 10;
  LinearProgram p;
  p.constraints = Matrix(m, d);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j) p.constraints(i, j) = rng.normal();
  p.objective.resize(d);
  for (auto& v : p.objective) v = rng.normal();
  p.row_senses.assign(m, RowSense::GreaterEqual);
  p.rhs.assign(m, -1.0);
  const auto t0 = std::chrono::steady_clock::now();
  const auto [primal, dual] = solve_dual_pair(p);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  ASSERT_EQ(primal.status, Status::Optimal);
  ASSERT_EQ(dual.status, Status::Optimal);
  EXPECT_NEAR(primal.objective_value, dual.objective_value, 1e-7 * (1 + std::abs(primal.objective_value)));
  EXPECT_LT(secs, 20.0);
}
