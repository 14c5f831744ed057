#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "swnehari/config.hpp"
#include "swnehari/errors.hpp"
#include "swnehari/fibering.hpp"
#include "swnehari/functional.hpp"
#include "swnehari/rayleigh.hpp"
#include "swnehari/solver.hpp"

namespace swnehari::cli {

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_m;
  std::optional<double> box_l;
  double lambda = 0.0;
  std::string direction;
  int samples = 400;
  double t_max = 0.0;
  double ratio_fault = 1.0;  // test hook: scales λ̂_* before the ratio check
};

/// Thrown to finish a subcommand with a specific code after reporting.
struct Exit {
  int code;
};

RunConfig resolve(const Flags& f) {
  RunConfig cfg = load_config(f.config);
  if (f.out) cfg.out_dir = *f.out;
  if (f.seed) cfg.apply_seed(*f.seed);
  if (f.grid_m) cfg.grid.points_per_axis = *f.grid_m;
  if (f.box_l) cfg.grid.half_width = *f.box_l;
  if (cfg.out_dir.empty()) throw ConfigError("empty output directory");
  return cfg;
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return fs::path(cfg.out_dir) / name;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
}

/// Numeric subcommands only run on validated parameters.
void require_valid(const RunConfig& cfg, std::ostream& err) {
  const auto report = validate_hypotheses(cfg.model);
  if (!report.all_passed()) {
    err << "error: parameters fail the hypotheses:";
    for (const auto& id : report.failures()) err << ' ' << id;
    err << '\n';
    throw Exit{kAssertionFailure};
  }
  if (cfg.model.dim_n != 3) throw ConfigError("numeric subcommands support dim_n = 3 only");
  try {
    cfg.grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

nlohmann::json estimate_json(const MultistartEstimate& m) {
  nlohmann::json j = m.best;
  j["multistart_values"] = m.values;
  j["relative_spread"] = m.relative_spread;
  return j;
}

struct Extremes {
  MultistartEstimate star;
  MultistartEstimate lower;
};

Extremes estimate(const Problem& pr, const RunConfig& cfg) {
  return {estimate_lambda_star(pr, cfg.extremal), estimate_lambda_lower(pr, cfg.extremal)};
}

void print_solution(std::ostream& out, const char* label, const NehariSolution& s) {
  out << label << ": J=" << s.energy << " second=" << s.second << " slope=" << s.slope
      << " residual/norm=" << s.residual_norm / s.norm << " manifold=" << to_string(s.manifold)
      << " iterations=" << s.iterations << '\n';
}

int cmd_validate(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve(f);
  const auto report = validate_hypotheses(cfg.model);
  nlohmann::json j = report;
  j["params"] = cfg.model;
  const auto path = out_path(cfg, "validation.json");
  write_json(path, j);
  if (report.all_passed()) {
    out << "all hypotheses hold; report: " << path.string() << '\n';
    return kOk;
  }
  err << "hypothesis failures:";
  for (const auto& id : report.failures()) err << ' ' << id;
  err << "\nreport: " << path.string() << '\n';
  return kAssertionFailure;
}

int cmd_estimate(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve(f);
  require_valid(cfg, err);
  const Problem pr(cfg.model, cfg.grid);
  Extremes ex = estimate(pr, cfg);
  const double star = ex.star.best.value;
  const double lower = ex.lower.best.value * f.ratio_fault;
  const double ratio = lower / star;
  const double expected = constants(cfg.model.p, cfg.model.q).ratio;
  const double rel = std::abs(ratio / expected - 1.0);

  nlohmann::json js = estimate_json(ex.star);
  js["extremal_residual"] = extremal_residual(pr, ex.star.best.minimizer, star);
  js["minimizer_file"] = "lambda_star_minimizer.field";
  nlohmann::json jl = estimate_json(ex.lower);
  jl["value"] = lower;
  jl["ratio"] = ratio;
  jl["ratio_expected"] = expected;
  jl["ratio_relative_error"] = rel;
  jl["minimizer_file"] = "lambda_star_lower_minimizer.field";
  write_json(out_path(cfg, "lambda_star.json"), js);
  write_json(out_path(cfg, "lambda_star_lower.json"), jl);
  write_field_binary(ex.star.best.minimizer, out_path(cfg, "lambda_star_minimizer.field").string());
  write_field_binary(ex.lower.best.minimizer, out_path(cfg, "lambda_star_lower_minimizer.field").string());

  out << std::setprecision(10) << "lambda_star = " << star << "\nlambda_star_lower = " << lower
      << "\nratio = " << ratio << " (expected " << expected << ")\n";
  if (!(rel <= 1e-6)) {
    err << "error: ratio check failed, relative error " << rel << '\n';
    return kAssertionFailure;
  }
  if (!(lower < star)) {
    err << "error: expected lambda_star_lower < lambda_star\n";
    return kAssertionFailure;
  }
  return kOk;
}

int cmd_solve(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve(f);
  require_valid(cfg, err);
  const Problem pr(cfg.model, cfg.grid);
  const auto star = estimate_lambda_star(pr, cfg.extremal);
  const double lambda = f.lambda;
  if (!(lambda > 0.0 && lambda < star.best.value)) {
    err << "error: lambda must lie in (0, lambda_star = " << star.best.value << ")\n";
    return kAssertionFailure;
  }
  SolverOptions opts = cfg.solver;
  opts.fallback_direction = star.best.minimizer;
  const auto u = minimize_on_nplus(pr, lambda, default_init(cfg.grid, Branch::plus), opts);
  const auto v = minimize_on_nminus(pr, lambda, default_init(cfg.grid, Branch::minus, opts.seed), opts);

  write_field_binary(u.field, out_path(cfg, "solution_plus.field").string());
  write_field_binary(v.field, out_path(cfg, "solution_minus.field").string());
  write_json(out_path(cfg, "solution_plus.json"), u);
  write_json(out_path(cfg, "solution_minus.json"), v);
  const double distinct = h1v_norm(u.field - v.field, pr.potential()) / u.norm;
  write_json(out_path(cfg, "solve.json"), {{"lambda", lambda},
                                           {"lambda_star", star.best.value},
                                           {"energy_u", u.energy},
                                           {"energy_v", v.energy},
                                           {"second_u", u.second},
                                           {"second_v", v.second},
                                           {"distinctness", distinct}});
  out << std::setprecision(8) << "lambda = " << lambda << " (lambda_star = " << star.best.value << ")\n";
  print_solution(out, "u (N+)", u);
  print_solution(out, "v (N-)", v);
  out << "distinctness = " << distinct << '\n';
  return kOk;
}

int cmd_trichotomy(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve(f);
  require_valid(cfg, err);
  const Problem pr(cfg.model, cfg.grid);
  const Extremes ex = estimate(pr, cfg);
  SolverOptions opts = cfg.solver;
  opts.fallback_direction = ex.star.best.minimizer;
  const auto lambdas = default_trichotomy_lambdas(ex.lower.best.value, ex.star.best.value);
  const auto rep = trichotomy_experiment(pr, lambdas, ex.lower.best.value, ex.star.best.value, opts);
  write_trichotomy_csv(rep, out_path(cfg, "trichotomy.csv").string());
  write_json(out_path(cfg, "trichotomy.json"), rep);

  out << std::setprecision(8) << "lambda_star = " << rep.lambda_star << ", lambda_star_lower = " << rep.lambda_lower
      << '\n';
  std::size_t mismatches = 0;
  for (const auto& row : rep.rows) {
    out << "lambda/lambda_star_lower = " << row.lambda_over_lower << ": ";
    if (!row.error.empty()) {
      out << "failed (" << row.error << ")\n";
      continue;
    }
    out << "J(v) = " << row.v->energy << ", predicted " << row.predicted_sign << ", observed " << row.observed_sign
        << (row.match ? "" : "  MISMATCH") << '\n';
    if (!row.match) ++mismatches;
  }
  if (rep.failures() == rep.rows.size()) {
    err << "error: every lambda failed\n";
    return kSolverFailure;
  }
  if (mismatches > 0) {
    err << "error: " << mismatches << " sign mismatch(es)\n";
    return kAssertionFailure;
  }
  return kOk;
}

int cmd_fibering(const Flags& f, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = resolve(f);
  require_valid(cfg, err);
  if (f.samples < 2) throw ConfigError("--samples must be at least 2");
  Field dir;
  try {
    dir = read_field_binary(f.direction);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("direction file: ") + e.what());
  }
  if (!(dir.grid() == cfg.grid)) throw ConfigError("direction file grid does not match the configured grid");
  const Problem pr(cfg.model, cfg.grid);
  const double p = cfg.model.p, q = cfg.model.q;
  const FiberTriple tr = fiber_triple(pr, dir);
  if (!(tr.s > 0.0 && tr.a_val > 0.0 && tr.b_val > 0.0)) {
    err << "error: direction must have positive norm, A and B\n";
    return kAssertionFailure;
  }
  const FiberingReport rep = fibering_report(tr, p, q, cfg.model.lambda);
  const double t_max = f.t_max > 0.0 ? f.t_max : 3.0 * rep.t_e;
  const double dt = t_max / f.samples;

  std::ofstream os(out_path(cfg, "fibering.csv"));
  if (!os) throw std::runtime_error("cannot write fibering.csv");
  os << "t,Q_n,Q_e\n" << std::setprecision(17);
  for (int k = 1; k <= f.samples; ++k) {
    const double t = k * dt;
    os << t << ',' << q_n(t, tr, p, q) << ',' << q_e(t, tr, p, q) << '\n';
  }
  nlohmann::json j = rep;
  j["triple"] = tr;
  j["lambda"] = cfg.model.lambda;
  j["manifold"] = to_string(classify(tr, cfg.model.lambda, p, q));
  j["t_max"] = t_max;
  j["samples"] = f.samples;
  write_json(out_path(cfg, "fibering.json"), j);
  out << std::setprecision(10) << "t_n = " << rep.t_n << ", Lambda_n = " << rep.lambda_n << "\nt_e = " << rep.t_e
      << ", Lambda_e = " << rep.lambda_e << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nehari-manifold experiments for the Stein-Weiss concave-convex problem", "swnehari"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&f](CLI::App* sub) {
    sub->add_option("--config", f.config, "key = value configuration file")->required();
    sub->add_option("--out", f.out, "output directory (overrides out_dir)");
    sub->add_option("--seed", f.seed, "seed for multistart and solver restarts");
    sub->add_option("--grid-m", f.grid_m, "points per axis");
    sub->add_option("--box-l", f.box_l, "box half-width");
  };
  auto* validate = app.add_subcommand("validate", "check the hypotheses and write validation.json");
  auto* est = app.add_subcommand("estimate-lambda", "estimate lambda* and lambda_*");
  auto* solve = app.add_subcommand("solve", "solve on both Nehari branches at one lambda");
  auto* tri = app.add_subcommand("trichotomy", "sign sweep of J(v) around lambda_*");
  auto* fib = app.add_subcommand("fibering", "sample Q_n and Q_e along a direction");
  for (auto* s : {validate, est, solve, tri, fib}) common(s);
  est->add_option("--inject-ratio-fault", f.ratio_fault)->group("");
  solve->add_option("--lambda", f.lambda, "lambda in (0, lambda*)")->required();
  fib->add_option("--direction", f.direction, "binary field file")->required();
  fib->add_option("--samples", f.samples, "number of t samples");
  fib->add_option("--t-max", f.t_max, "largest t (default 3 t_e)");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    out << std::setprecision(8);
    if (*validate) return cmd_validate(f, out, err);
    if (*est) return cmd_estimate(f, out, err);
    if (*solve) return cmd_solve(f, out, err);
    if (*tri) return cmd_trichotomy(f, out, err);
    if (*fib) return cmd_fibering(f, out, err);
  } catch (const Exit& e) {
    return e.code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const HypothesisError& e) {
    err << "hypothesis error: " << e.what() << '\n';
    return kAssertionFailure;
  } catch (const SolverError& e) {
    err << "solver failure (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kConfigError;
}

}  // namespace swnehari::cli
