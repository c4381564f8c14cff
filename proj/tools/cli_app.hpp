#pragma once

// Command-line front end. run_cli() is the whole program minus process
// setup, so tests can drive it in-process.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hullmle/hullmle.hpp"

namespace hullmle::cli {

using nlohmann::ordered_json;

enum ExitCode : int {
  kUsage = 64,
  kDataError = 65,
  kNoInput = 66,
  kInternal = 70,
};

inline int exit_code(HullStatus s) {
  switch (s) {
    case HullStatus::Interior: return 0;
    case HullStatus::Exterior: return 1;
    case HullStatus::Boundary: return 2;
    case HullStatus::Degenerate: return 3;
  }
  return kInternal;
}

/// Non-finite values are written as the strings "inf", "-inf", "nan".
inline ordered_json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

inline ordered_json num_array(std::span<const double> v) {
  ordered_json a = ordered_json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

/// Inverse of num() for a single field.
inline double parse_num(const ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  const std::string s = j.get<std::string>();
  if (s == "inf") return kInfinity;
  if (s == "-inf") return -kInfinity;
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  throw std::invalid_argument("not a numeric token: " + s);
}

struct Common {
  std::size_t threads = 0;  // 0: HULLMLE_THREADS, then hardware
  SolverConfig solver;
};

inline std::size_t resolve_threads(std::size_t flag) {
  if (flag) return flag;
  if (const char* env = std::getenv("HULLMLE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw std::invalid_argument("HULLMLE_THREADS must be a positive integer");
  }
  return default_thread_count();
}

inline void add_common(CLI::App* app, Common& c) {
  app->add_option("--threads", c.threads, "worker threads (default: $HULLMLE_THREADS, else all cores)")
      ->check(CLI::PositiveNumber);
  app->add_option("--feas-tol", c.solver.feas_tol, "LP primal feasibility tolerance")->capture_default_str();
  app->add_option("--pivot-tol", c.solver.pivot_tol, "LP pivot tolerance")->capture_default_str();
  app->add_option("--opt-tol", c.solver.opt_tol, "LP reduced-cost tolerance")->capture_default_str();
  app->add_option("--boundary-tol", c.solver.boundary_tol, "relative band for a Boundary verdict")
      ->capture_default_str();
  app->add_option("--duality-tol", c.solver.duality_tol, "primal/dual agreement tolerance")->capture_default_str();
  app->add_option("--max-lp-iterations", c.solver.max_iterations, "LP iteration cap (0: 50 (rows + cols))")
      ->capture_default_str();
}

inline ordered_json solver_json(const Common& c, std::size_t threads) {
  return {{"threads", threads},
          {"feas_tol", c.solver.feas_tol},
          {"pivot_tol", c.solver.pivot_tol},
          {"opt_tol", c.solver.opt_tol},
          {"boundary_tol", c.solver.boundary_tol},
          {"duality_tol", c.solver.duality_tol},
          {"max_lp_iterations", c.solver.max_iterations}};
}

inline Vector single_point(const std::string& path) {
  const Matrix m = read_matrix_csv(path);
  if (m.rows() != 1) throw std::invalid_argument(path + ": expected exactly one point, found " + std::to_string(m.rows()));
  return m.row_vector(0);
}

inline void check_dims(const Matrix& target, std::size_t cols, const std::string& what) {
  if (target.cols() != cols)
    throw std::invalid_argument(what + " has " + std::to_string(cols) + " columns but the target set has " +
                                std::to_string(target.cols()));
}

/// "mean" centers by the column means; "origin" takes the points as already
/// centered; otherwise a comma-separated reference point.
inline TargetSet build_target(const Matrix& raw, const std::string& center) {
  if (center == "mean") return make_target_set(raw);
  if (center == "origin") return TargetSet::from_centered(raw, Vector(raw.cols(), 0.0));
  Vector c;
  std::stringstream ss(center);
  std::string tok;
  while (std::getline(ss, tok, ',')) c.push_back(detail::parse_double(tok, "--center", 1));
  if (c.size() != raw.cols())
    throw std::invalid_argument("--center needs 'mean', 'origin' or " + std::to_string(raw.cols()) + " coordinates");
  Matrix shifted = raw;
  for (std::size_t i = 0; i < shifted.rows(); ++i)
    for (std::size_t j = 0; j < shifted.cols(); ++j) shifted(i, j) -= c[j];
  return TargetSet::from_centered(shifted, c);
}

inline void add_center(CLI::App* app, std::string& center) {
  app->add_option("--center", center, "reference point: mean, origin, or comma-separated coordinates")
      ->capture_default_str();
}

inline ordered_json verdict_json(const HullVerdict& v, const TargetSet& t) {
  ordered_json r;
  r["status"] = to_string(v.status);
  r["gamma"] = num(v.gamma);
  r["boundary_point"] = v.boundary_point.empty() ? ordered_json(nullptr) : num_array(v.boundary_point);
  if (v.hyperplane) {
    // centered 1 + z.(x - c) >= 0 becomes (1 - z.c) + z.x >= 0 in input coordinates
    const Vector& z = v.hyperplane->normal;
    r["hyperplane"] = {{"offset", num(v.hyperplane->offset - dot(z, t.centroid()))}, {"normal", num_array(z)}};
  } else {
    r["hyperplane"] = nullptr;
  }
  r["lp_objective"] = num(v.objective);
  r["lp_iterations"] = v.iterations;
  return r;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto t = detail::trim(tok);
    if (t.empty()) throw std::invalid_argument(what + ": empty entry");
    out.push_back(detail::parse_double(t, what, 1));
  }
  if (out.empty()) throw std::invalid_argument(what + ": empty list");
  return out;
}

struct HullTestArgs {
  std::string target, point, center = "mean";
};
struct MinScaleArgs {
  std::string target, test, center = "mean";
  std::optional<double> prune_fraction;
};
struct PruneCurveArgs {
  std::string target, test, center = "mean", fractions = "1,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1";
};
struct BenchmarkArgs {
  std::size_t n = 100000, d = 20, trials = 1;
  std::uint64_t seed = 1;
  std::string prune_fractions;
};
struct EstimateArgs {
  std::string graph, mask, terms = "edges,triangles", theta0;
  bool exact = false;
  EstimatorConfig cfg;
};
struct UnboundedArgs {
  std::string target, test, alphas = "1,2,4,8,16";
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"Convex hull diagnostics for Monte Carlo MLE with missing data", "hullmle"};
    app.set_version_flag("--version", HULLMLE_VERSION);
    app.require_subcommand(1);

    CLI::App* hull = app.add_subcommand("hull-test", "classify one point against the hull of a target set");
    hull->add_option("target", hull_.target, "target set CSV")->required();
    hull->add_option("point", hull_.point, "CSV with one point")->required();
    add_center(hull, hull_.center);
    add_common(hull, common_);

    CLI::App* ms = app.add_subcommand("min-scale", "smallest hull multiplier over a test set");
    ms->add_option("target", ms_.target, "target set CSV")->required();
    ms->add_option("test", ms_.test, "test set CSV")->required();
    add_center(ms, ms_.center);
    ms->add_option("--prune-fraction", ms_.prune_fraction,
                   "keep this fraction of target points, deepest by Mahalanobis distance removed first");
    add_common(ms, common_);

    CLI::App* pc = app.add_subcommand("prune-curve", "min-scale as a function of the kept fraction");
    pc->add_option("target", pc_.target, "target set CSV")->required();
    pc->add_option("test", pc_.test, "test set CSV")->required();
    add_center(pc, pc_.center);
    pc->add_option("--fractions", pc_.fractions, "comma-separated kept fractions")->capture_default_str();
    add_common(pc, common_);

    CLI::App* bm = app.add_subcommand("benchmark", "all-ones corner against uniform points in the unit cube");
    bm->add_option("--n", bm_.n, "points per trial")->capture_default_str()->check(CLI::PositiveNumber);
    bm->add_option("--d", bm_.d, "dimension")->capture_default_str()->check(CLI::PositiveNumber);
    bm->add_option("--trials", bm_.trials, "independent trials")->capture_default_str()->check(CLI::PositiveNumber);
    bm->add_option("--seed", bm_.seed, "master seed")->capture_default_str();
    bm->add_option("--prune-fractions", bm_.prune_fractions, "also report a prune curve at these kept fractions");
    add_common(bm, common_);

    CLI::App* est = app.add_subcommand("estimate", "iterated rescaled Monte Carlo MLE with missing dyads");
    est->add_option("graph", est_.graph, "graph file: vertex count, then 1-based edges 'i j'")->required();
    est->add_option("mask", est_.mask, "observed dyads 'i j value'; unlisted dyads are missing")->required();
    est->add_option("--terms", est_.terms, "statistics: edges, twostars, triangles")->capture_default_str();
    est->add_option("--theta0", est_.theta0, "starting parameter, comma-separated, or 'exact' (default: zeros)");
    est->add_option("--r", est_.cfg.r_target, "unconstrained sample size")->capture_default_str();
    est->add_option("--s", est_.cfg.s_test, "constrained sample size")->capture_default_str();
    est->add_option("--safety", est_.cfg.safety_factor, "fraction of the multiplier used per step")
        ->capture_default_str();
    est->add_option("--stop", est_.cfg.stop_threshold, "multiplier that ends the iteration")->capture_default_str();
    est->add_option("--max-outer", est_.cfg.max_outer_iterations, "outer iteration cap")->capture_default_str();
    est->add_option("--grad-tol", est_.cfg.grad_tol, "inner optimizer gradient tolerance")->capture_default_str();
    est->add_option("--max-inner", est_.cfg.max_inner_iterations, "inner optimizer iteration cap")
        ->capture_default_str();
    est->add_option("--interval", est_.cfg.mcmc_interval, "MCMC thinning (0: 10 x free dyads)")
        ->capture_default_str();
    est->add_option("--seed", est_.cfg.seed, "master seed")->capture_default_str();
    est->add_flag("--exact", est_.exact, "also report the exact MLE by enumeration");
    add_common(est, common_);

    CLI::App* du = app.add_subcommand("demo-unbounded", "sampled log-likelihood ratio along a separating direction");
    du->add_option("target", du_.target, "unconstrained sample statistics CSV")->required();
    du->add_option("test", du_.test, "constrained sample statistics CSV")->required();
    du->add_option("--alphas", du_.alphas, "step multipliers")->capture_default_str();
    add_common(du, common_);

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::CallForVersion&) {
      out_ << HULLMLE_VERSION << '\n';
      return 0;
    } catch (const CLI::ParseError& e) {
      err_ << "hullmle: " << e.what() << '\n';
      return kUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    try {
      common_.solver.validate();
      threads_ = resolve_threads(common_.threads);
      int code = 0;
      ordered_json params, result;
      std::string name;
      if (*hull) code = hull_test(name, params, result);
      else if (*ms) code = min_scale_cmd(name, params, result);
      else if (*pc) code = prune_curve_cmd(name, params, result);
      else if (*bm) code = benchmark_cmd(name, params, result);
      else if (*est) code = estimate_cmd(name, params, result);
      else code = unbounded_cmd(name, params, result);
      params["solver"] = solver_json(common_, threads_);
      ordered_json doc;
      doc["manifest"] = {{"command", name},
                         {"parameters", params},
                         {"version", HULLMLE_VERSION},
                         {"duration_seconds",
                          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
      doc["result"] = std::move(result);
      out_ << doc.dump(2) << '\n';
      if (!failure_.empty()) {
        err_ << "hullmle: " << failure_ << '\n';
        return kInternal;
      }
      return code;
    } catch (const FileError& e) {
      err_ << "hullmle: " << e.what() << '\n';
      return kNoInput;
    } catch (const ParseError& e) {
      err_ << "hullmle: " << e.what() << '\n';
      return kDataError;
    } catch (const std::invalid_argument& e) {
      err_ << "hullmle: " << e.what() << '\n';
      return kDataError;
    } catch (const NonexistentMle& e) {
      err_ << "hullmle: no maximum likelihood estimate: " << e.what() << '\n';
      return kDataError;
    } catch (const DegenerateSampleError& e) {
      err_ << "hullmle: " << e.what() << '\n';
      return kDataError;
    } catch (const std::exception& e) {
      err_ << "hullmle: internal error: " << e.what() << '\n';
      return kInternal;
    }
  }

 private:
  int hull_test(std::string& name, ordered_json& params, ordered_json& result) {
    name = "hull-test";
    params = {{"target", hull_.target}, {"point", hull_.point}, {"center", hull_.center}};
    const Matrix target = read_matrix_csv(hull_.target);
    const Vector p = single_point(hull_.point);
    check_dims(target, p.size(), "point");
    const TargetSet t = build_target(target, hull_.center);
    const HullVerdict v = query(t, p, common_.solver);
    result = verdict_json(v, t);
    result["centroid"] = num_array(t.centroid());
    result["rank"] = t.rank();
    return exit_code(v.status);
  }

  static ordered_json scale_json(const ScaleReport& rep) {
    return {{"min_scale", num(rep.min_scale)},
            {"argmin", rep.argmin},
            {"any_degenerate", rep.any_degenerate},
            {"per_point", num_array(rep.per_point)}};
  }

  int min_scale_cmd(std::string& name, ordered_json& params, ordered_json& result) {
    name = "min-scale";
    params = {{"target", ms_.target}, {"test", ms_.test}, {"center", ms_.center},
              {"prune_fraction", ms_.prune_fraction ? ordered_json(*ms_.prune_fraction) : ordered_json(nullptr)}};
    const Matrix target = read_matrix_csv(ms_.target);
    const Matrix test = read_matrix_csv(ms_.test);
    check_dims(target, test.cols(), "test set");
    TargetSet t = build_target(target, ms_.center);
    const std::size_t full = t.size();
    if (ms_.prune_fraction) t = mahalanobis_prune(t, *ms_.prune_fraction);
    result = scale_json(min_scale(t, test, common_.solver, threads_));
    result["target_size"] = full;
    result["kept"] = t.size();
    return 0;
  }

  static ordered_json curve_json(const std::vector<PrunePoint>& curve) {
    ordered_json a = ordered_json::array();
    for (const PrunePoint& p : curve)
      a.push_back({{"fraction", p.fraction},
                   {"kept", p.kept},
                   {"min_scale", num(p.min_scale)},
                   {"any_degenerate", p.any_degenerate}});
    return a;
  }

  int prune_curve_cmd(std::string& name, ordered_json& params, ordered_json& result) {
    name = "prune-curve";
    params = {{"target", pc_.target}, {"test", pc_.test}, {"center", pc_.center}, {"fractions", pc_.fractions}};
    const std::vector<double> fr = parse_list(pc_.fractions, "--fractions");
    const Matrix target = read_matrix_csv(pc_.target);
    const Matrix test = read_matrix_csv(pc_.test);
    check_dims(target, test.cols(), "test set");
    const TargetSet t = build_target(target, pc_.center);
    result["target_size"] = t.size();
    result["curve"] = curve_json(prune_curve(t, test, fr, common_.solver, threads_));
    return 0;
  }

  int benchmark_cmd(std::string& name, ordered_json& params, ordered_json& result) {
    name = "benchmark";
    params = {{"n", bm_.n}, {"d", bm_.d}, {"trials", bm_.trials}, {"seed", bm_.seed},
              {"prune_fractions", bm_.prune_fractions}};
    std::vector<double> fr;
    if (!bm_.prune_fractions.empty()) fr = parse_list(bm_.prune_fractions, "--prune-fractions");
    if (bm_.n <= bm_.d) throw std::invalid_argument("--n must exceed --d for a full-dimensional cube sample");
    ordered_json trials = ordered_json::array();
    double sum = 0.0, sum2 = 0.0;
    bool all_below = true;
    for (std::size_t i = 0; i < bm_.trials; ++i) {
      const std::uint64_t seed = cube_trial_seed(bm_.seed, i);
      const CubeTrial tr = cube_corner_trial(bm_.n, bm_.d, seed, common_.solver);
      ordered_json j = {{"trial", i},
                        {"seed", seed},
                        {"status", to_string(tr.verdict.status)},
                        {"gamma", num(tr.verdict.gamma)},
                        {"duration_seconds", tr.seconds}};
      if (!fr.empty()) {
        const TargetSet t = make_target_set(uniform_cube(bm_.n, bm_.d, seed));
        Matrix corner(1, bm_.d);
        for (std::size_t k = 0; k < bm_.d; ++k) corner(0, k) = 1.0;
        j["prune_curve"] = curve_json(prune_curve(t, corner, fr, common_.solver, threads_));
      }
      trials.push_back(std::move(j));
      sum += tr.verdict.gamma;
      sum2 += tr.verdict.gamma * tr.verdict.gamma;
      all_below = all_below && tr.verdict.gamma < 1.0;
    }
    const double k = static_cast<double>(bm_.trials);
    const double mean = sum / k;
    result["trials"] = std::move(trials);
    result["mean_gamma"] = num(mean);
    result["sd_gamma"] = bm_.trials > 1 ? num(std::sqrt(std::max(0.0, (sum2 - k * mean * mean) / (k - 1)))) : nullptr;
    result["all_gamma_below_one"] = all_below;
    if (!all_below) failure_ = "check failed: the corner lies inside the sampled hull in some trial";
    return 0;
  }

  int estimate_cmd(std::string& name, ordered_json& params, ordered_json& result) {
    name = "estimate";
    EstimatorConfig& cfg = est_.cfg;
    cfg.solver = common_.solver;
    cfg.threads = threads_;
    params = {{"graph", est_.graph},     {"mask", est_.mask},           {"terms", est_.terms},
              {"theta0", est_.theta0},   {"r", cfg.r_target},           {"s", cfg.s_test},
              {"safety", cfg.safety_factor}, {"stop", cfg.stop_threshold}, {"max_outer", cfg.max_outer_iterations},
              {"grad_tol", cfg.grad_tol}, {"max_inner", cfg.max_inner_iterations},
              {"interval", cfg.mcmc_interval}, {"seed", cfg.seed},        {"exact", est_.exact}};
    StatDef def;
    {
      std::stringstream ss(est_.terms);
      std::string tok;
      while (std::getline(ss, tok, ',')) def.terms.push_back(parse_term(std::string(detail::trim(tok))));
    }
    def.validate();
    const Graph y = read_graph(est_.graph);
    const ObservationMask mask = read_mask(est_.mask, y);
    if (mask.observed_count() == 0) throw std::invalid_argument("nothing observed: the mask lists no dyads");
    const GraphModel model{def, y.vertices()};

    std::optional<ExactMle> exact;
    auto need_exact = [&]() -> const ExactMle& {
      if (!exact) exact = exact_mle(model, y, mask);
      return *exact;
    };
    Vector theta0(def.size(), 0.0);
    if (est_.theta0 == "exact") {
      theta0 = need_exact().theta;
    } else if (!est_.theta0.empty()) {
      theta0 = parse_list(est_.theta0, "--theta0");
      if (theta0.size() != def.size())
        throw std::invalid_argument("--theta0 needs " + std::to_string(def.size()) + " values");
    }

    const EstimatorTrace tr = iterate_until_contained(model, y, mask, theta0, cfg);
    ordered_json cols = ordered_json::array({"iteration"});
    for (Term t : def.terms) cols.push_back(std::string("theta_") + to_string(t));
    cols.push_back("multiplier");
    ordered_json rows = ordered_json::array();
    ordered_json diag = ordered_json::array();
    for (std::size_t i = 0; i < tr.iterations.size(); ++i) {
      const TraceEntry& e = tr.iterations[i];
      ordered_json row = ordered_json::array({i});
      for (double x : e.theta) row.push_back(num(x));
      row.push_back(num(e.multiplier));
      rows.push_back(std::move(row));
      diag.push_back({{"variance_dominates", e.variance_dominates}, {"step_converged", e.step_converged}});
    }
    result["statistics"] = statistics(y, def);
    result["observed_dyads"] = mask.observed_count();
    result["missing_dyads"] = mask.free_dyads().size();
    result["trace"] = {{"columns", cols}, {"rows", rows}};
    result["diagnostics"] = diag;
    result["final_theta"] = num_array(tr.final_theta);
    result["converged"] = tr.converged;
    if (est_.exact) {
      try {
        const ExactMle& ex = need_exact();
        result["exact_mle"] = {{"theta", num_array(ex.theta)}, {"loglik", num(ex.loglik)}};
      } catch (const NonexistentMle& e) {
        result["exact_mle"] = {{"error", e.what()}};
      }
    }
    return 0;
  }

  int unbounded_cmd(std::string& name, ordered_json& params, ordered_json& result) {
    name = "demo-unbounded";
    params = {{"target", du_.target}, {"test", du_.test}, {"alphas", du_.alphas}};
    const std::vector<double> alphas = parse_list(du_.alphas, "--alphas");
    const Matrix y = read_matrix_csv(du_.target);
    const Matrix z = read_matrix_csv(du_.test);
    check_dims(y, z.cols(), "test set");
    auto [gy, gz] = center_by(y, z);
    const TargetSet t = TargetSet::from_centered(gy, Vector(gy.cols(), 0.0));
    const ScaleReport rep = min_scale(t, gz, common_.solver, threads_);
    if (!(rep.min_scale < 1.0))
      throw std::invalid_argument("every test point lies in the closed hull (min scale " +
                                  std::to_string(rep.min_scale) + "); the sampled likelihood is bounded");
    const HullVerdict v = query(t, gz.row(rep.argmin), common_.solver);
    if (!v.hyperplane) throw std::runtime_error("no separating hyperplane for the exterior test point");
    const Vector w = unbounded_direction(gy, gz, v.hyperplane->normal);
    const Vector vals = demonstrate_unbounded(gy, gz, w, alphas);
    bool increasing = true;
    for (std::size_t i = 1; i < vals.size(); ++i) increasing = increasing && vals[i] > vals[i - 1];
    result["min_scale"] = num(rep.min_scale);
    result["argmin"] = rep.argmin;
    result["direction"] = num_array(w);
    result["alphas"] = num_array(alphas);
    result["loglik_ratio"] = num_array(vals);
    result["strictly_increasing"] = increasing;
    return 0;
  }

  std::ostream& out_;
  std::ostream& err_;
  Common common_;
  std::size_t threads_ = 1;
  std::string failure_;
  HullTestArgs hull_;
  MinScaleArgs ms_;
  PruneCurveArgs pc_;
  BenchmarkArgs bm_;
  EstimateArgs est_;
  UnboundedArgs du_;
};

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Runner r(out, err);
  return r.run(argc, argv);
}

}  // namespace hullmle::cli
