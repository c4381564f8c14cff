#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "cli_app.hpp"

using namespace hullmle;
using hullmle::cli::ordered_json;

namespace {

const std::string kData = HULLMLE_SAMPLE_DATA;

struct CliRun {
  int code;
  std::string out, err;
  ordered_json doc() const { return ordered_json::parse(out); }
  const ordered_json& result() const {
    cached = doc();
    return cached["result"];
  }
  mutable ordered_json cached;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "hullmle");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str(), {}};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("hullmle_cli_" + name);
  std::ofstream(path) << text;
  return path.string();
}

std::string strip_durations(const std::string& s) {
  static const std::regex re("\"duration_seconds\": [^,\\n]*");
  return std::regex_replace(s, re, "\"duration_seconds\": 0");
}

const std::string kTriangle = kData + "/triangle.csv";

}  // namespace

TEST(CliHullTest, TriangleAboutTheOrigin) {
  const CliRun in = run({"hull-test", kTriangle, kData + "/point_inside.csv", "--center", "origin", "--threads", "1"});
  EXPECT_EQ(in.code, 0) << in.err;
  EXPECT_EQ(in.result()["status"], "interior");
  EXPECT_NEAR(in.result()["gamma"].get<double>(), 1.5, 1e-12);

  const CliRun out = run({"hull-test", kTriangle, kData + "/point_outside.csv", "--center", "origin", "--threads", "1"});
  EXPECT_EQ(out.code, 1);
  const ordered_json& r = out.result();
  EXPECT_NEAR(r["gamma"].get<double>(), 1.0 / 3.0, 1e-12);
  // supporting line 1 + x1 - 3 x2 = 0 through (-1,0) and (2,1)
  EXPECT_NEAR(r["hyperplane"]["offset"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(r["hyperplane"]["normal"][0].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(r["hyperplane"]["normal"][1].get<double>(), -3.0, 1e-12);
}

TEST(CliHullTest, ExitCodesFollowTheVerdict) {
  // vertex (2,1) lies on the boundary
  const std::string vertex = write_temp("vertex.csv", "2,1\n");
  EXPECT_EQ(run({"hull-test", kTriangle, vertex, "--center", "origin"}).code, 2);
  const std::string line = write_temp("line.csv", "0,0\n1,1\n2,2\n-1,-1\n");
  const std::string p = write_temp("p.csv", "0.5,0.2\n");
  const CliRun deg = run({"hull-test", line, p});
  EXPECT_EQ(deg.code, 3) << deg.err;
  EXPECT_EQ(deg.result()["gamma"], "inf");
}

TEST(CliHullTest, MeanCenteringIsTheDefault) {
  const CliRun r = run({"hull-test", kTriangle, kData + "/point_inside.csv"});
  EXPECT_NEAR(r.result()["centroid"][0].get<double>(), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(r.result()["centroid"][1].get<double>(), 0.0, 1e-15);
  // edge (2,1)-(1,-1) meets the ray along y = 0 at x = 1.5
  EXPECT_NEAR(r.result()["gamma"].get<double>(), (1.5 - 2.0 / 3.0) / (1.0 - 2.0 / 3.0), 1e-12);
  const CliRun c = run({"hull-test", kTriangle, kData + "/point_inside.csv", "--center", "0.5,0"});
  EXPECT_NEAR(c.result()["gamma"].get<double>(), 2.0, 1e-12);
}

TEST(CliErrors, UsageDataAndFileErrors) {
  const std::string bad = write_temp("bad.csv", "1,2\n3,x\n");
  const CliRun r = run({"hull-test", bad, kData + "/point_inside.csv"});
  EXPECT_GE(r.code, 64);
  EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());

  EXPECT_GE(run({"hull-test", kTriangle}).code, 64);
  EXPECT_GE(run({"no-such-verb"}).code, 64);
  EXPECT_GE(run({"hull-test", kTriangle, "/nonexistent.csv"}).code, 64);
  const std::string p3 = write_temp("p3.csv", "1,2,3\n");
  EXPECT_GE(run({"hull-test", kTriangle, p3}).code, 64);
  EXPECT_GE(run({"hull-test", kTriangle, kData + "/two_points.csv"}).code, 64);
  EXPECT_GE(run({"hull-test", kTriangle, kData + "/point_inside.csv", "--center", "1,2,3"}).code, 64);
  EXPECT_EQ(run({"--version"}).code, 0);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliMinScale, TwoPointsAndInfinity) {
  const CliRun r = run({"min-scale", kTriangle, kData + "/two_points.csv", "--center", "origin"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.result()["min_scale"].get<double>(), 1.0 / 3.0, 1e-12);
  EXPECT_EQ(r.result()["argmin"], 0);

  const CliRun inf = run({"min-scale", kTriangle, kData + "/centroid_point.csv", "--center", "origin"});
  ASSERT_EQ(inf.code, 0) << inf.err;
  EXPECT_NE(inf.out.find("\"min_scale\": \"inf\""), std::string::npos);
  EXPECT_EQ(cli::parse_num(inf.result()["min_scale"]), kInfinity);
}

TEST(CliRoundTrip, NumbersReparseExactly) {
  EXPECT_EQ(cli::parse_num(ordered_json::parse(ordered_json(cli::num(-kInfinity)).dump())), -kInfinity);
  EXPECT_TRUE(std::isnan(cli::parse_num(cli::num(std::numeric_limits<double>::quiet_NaN()))));

  Rng rng(3);
  Matrix target(40, 3);
  for (std::size_t i = 0; i < 40; ++i)
    for (std::size_t j = 0; j < 3; ++j) target(i, j) = rng.normal();
  Matrix test(6, 3);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 3; ++j) test(i, j) = 1.7 * rng.normal();
  std::ostringstream a, b;
  write_matrix_csv(a, target);
  write_matrix_csv(b, test);
  const std::string tf = write_temp("rt_target.csv", a.str()), sf = write_temp("rt_test.csv", b.str());

  const CliRun r = run({"min-scale", tf, sf, "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const ScaleReport rep = min_scale(make_target_set(read_matrix_csv(tf)), read_matrix_csv(sf));
  const ordered_json& res = r.result();
  EXPECT_EQ(cli::parse_num(res["min_scale"]), rep.min_scale);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(cli::parse_num(res["per_point"][i]), rep.per_point[i]);
}

TEST(CliDeterminism, IdenticalDocumentsAcrossRunsAndThreads) {
  const std::vector<std::string> base = {"estimate", kData + "/demo_graph.txt", kData + "/demo_mask.txt",
                                         "--seed", "99", "--r", "200", "--s", "50"};
  auto with = [&](const char* threads) {
    std::vector<std::string> a = base;
    a.insert(a.end(), {"--threads", threads});
    return run(a);
  };
  const CliRun one = with("1"), again = with("1"), four = with("4");
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_EQ(strip_durations(one.out), strip_durations(again.out));
  const ordered_json r1 = one.doc()["result"], r4 = four.doc()["result"];
  EXPECT_EQ(r1, r4);

  const CliRun b1 = run({"benchmark", "--n", "300", "--d", "3", "--trials", "3", "--seed", "4", "--threads", "1"});
  const CliRun b2 = run({"benchmark", "--n", "300", "--d", "3", "--trials", "3", "--seed", "4", "--threads", "1"});
  EXPECT_EQ(strip_durations(b1.out), strip_durations(b2.out));
}

TEST(CliEstimate, DemoInstanceAndErrors) {
  const CliRun r = run({"estimate", kData + "/demo_graph.txt", kData + "/demo_mask.txt", "--exact", "--seed", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const ordered_json& res = r.result();
  EXPECT_EQ(res["missing_dyads"], 2);
  EXPECT_EQ(res["trace"]["columns"], ordered_json::parse(R"(["iteration","theta_edges","theta_triangles","multiplier"])"));
  EXPECT_TRUE(res["converged"].get<bool>());
  const auto& rows = res["trace"]["rows"];
  EXPECT_GE(rows.back()[3].get<double>(), 1.11);
  EXPECT_EQ(res["exact_mle"]["theta"].size(), 2u);

  const std::string none = write_temp("none.txt", "");
  const CliRun e = run({"estimate", kData + "/demo_graph.txt", none});
  EXPECT_GE(e.code, 64);
  EXPECT_NE(e.err.find("nothing observed"), std::string::npos);

  EXPECT_GE(run({"estimate", kData + "/demo_graph.txt", kData + "/demo_mask.txt", "--terms", "edges,bogus"}).code, 64);
  EXPECT_GE(run({"estimate", kData + "/demo_graph.txt", kData + "/demo_mask.txt", "--theta0", "1"}).code, 64);
}

TEST(CliEstimate, FullyObservedFromTheExactMleStopsAtOnce) {
  std::string mask;
  const Graph y = read_graph(kData + "/demo_graph.txt");
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j)
      mask += std::to_string(i + 1) + " " + std::to_string(j + 1) + " " + (y.has_edge(i, j) ? "1" : "0") + "\n";
  const std::string mf = write_temp("full_mask.txt", mask);
  int single = 0;
  for (int seed = 1; seed <= 5; ++seed) {
    const CliRun r = run({"estimate", kData + "/demo_graph.txt", mf, "--theta0", "exact", "--seed", std::to_string(seed)});
    ASSERT_EQ(r.code, 0) << r.err;
    single += r.result()["trace"]["rows"].size() == 1;
  }
  EXPECT_GE(single, 4);
}

TEST(CliUnbounded, IncreasingAlongTheSeparatingDirection) {
  // one constrained point far outside the unconstrained cloud
  const std::string y = write_temp("uy.csv", "0,0\n1,0\n0,1\n1,1\n0.5,0.5\n");
  const std::string z = write_temp("uz.csv", "0.5,0.5\n3,3\n");
  const CliRun r = run({"demo-unbounded", y, z});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.result()["strictly_increasing"].get<bool>());
  EXPECT_LT(r.result()["min_scale"].get<double>(), 1.0);

  const std::string inside = write_temp("uz_in.csv", "0.5,0.5\n0.6,0.4\n");
  EXPECT_GE(run({"demo-unbounded", y, inside}).code, 64);
}

TEST(CliBenchmark, CornerIsAlwaysOutside) {
  const CliRun r = run({"benchmark", "--n", "100", "--d", "2", "--trials", "5", "--seed", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.result()["all_gamma_below_one"].get<bool>());
  for (const auto& t : r.result()["trials"]) EXPECT_LT(t["gamma"].get<double>(), 1.0);
}

TEST(CliPruneCurve, ReportsEveryFraction) {
  const CliRun r = run({"prune-curve", kTriangle, kData + "/two_points.csv", "--center", "origin", "--fractions", "1,0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.result()["curve"].size(), 2u);
  EXPECT_NEAR(r.result()["curve"][0]["min_scale"].get<double>(), 1.0 / 3.0, 1e-12);
}
