#include "swnehari/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>

#include "swnehari/errors.hpp"
#include "swnehari/rayleigh.hpp"

namespace swnehari {

const char* to_string(Branch b) { return b == Branch::plus ? "Nplus" : "Nminus"; }

std::optional<ReducedEnergy> reduced_energy(const Problem& pr, const Field& w, double lambda, Branch branch) {
  const double p = pr.p();
  const double q = pr.q();
  FieldTerms ft = field_terms(pr, w);
  const FiberTriple tr{ft.norm_sq, ft.A_val, ft.B_val};
  if (!(tr.a_val > 0.0 && tr.b_val > 0.0)) return std::nullopt;
  const NehariRoots roots = nehari_roots(tr, lambda, p, q);
  if (roots.kind != NehariRoots::Kind::two_roots) return std::nullopt;
  const double t = branch == Branch::plus ? roots.t_plus : roots.t_minus;

  const double t2 = t * t;
  const double tq = std::pow(t, q);
  const double t2p = std::pow(t, 2.0 * p);
  const double value = 0.5 * t2 * tr.s - lambda / q * tq * tr.a_val - t2p * tr.b_val / (2.0 * p);
  // Chain rule through t^±(w) drops out because J'(tw)(tw) = 0.
  Field g = t2 * ft.h1v;
  g.axpy(-lambda * tq, ft.concave);
  g.axpy(-t2p, ft.nonlocal);
  return ReducedEnergy{value, t, std::move(g)};
}

Field project_to_nehari(const Problem& pr, const Field& w, double lambda, Branch branch) {
  const FiberTriple tr = fiber_triple(pr, w);
  const NehariRoots roots = nehari_roots(tr, lambda, pr.p(), pr.q());
  if (roots.kind != NehariRoots::Kind::two_roots) {
    throw SolverError(SolverError::Kind::no_roots, "direction has Lambda_n <= lambda; no projection onto N_lambda");
  }
  return (branch == Branch::plus ? roots.t_plus : roots.t_minus) * w;
}

NehariSolution describe_solution(const Problem& pr, Field u, double lambda) {
  NehariSolution s;
  const EnergyBreakdown e = energy(pr, u, lambda);
  const double p = pr.p();
  const double q = pr.q();
  s.lambda = lambda;
  s.energy = e.J_val;
  s.slope = e.norm_sq - lambda * e.A_val - e.B_val;
  s.second = e.norm_sq - lambda * (q - 1.0) * e.A_val - (2.0 * p - 1.0) * e.B_val;
  s.residual_norm = residual_norm(pr, u, lambda);
  s.norm = std::sqrt(e.norm_sq);
  s.manifold = classify(FiberTriple{e.norm_sq, e.A_val, e.B_val}, lambda, p, q);
  s.positivity_min = u.min();
  s.zero_nodes = count_zero_nodes(u);
  s.field = std::move(u);
  return s;
}

Field default_init(const GridSpec& grid, Branch branch, std::uint64_t seed) {
  return branch == Branch::plus ? gaussian_bump(grid) : perturbed_bump(grid, seed, 0.1);
}

namespace {

NehariSolution solve_branch(const Problem& pr, double lambda, const Field& init, const SolverOptions& opts, Branch branch) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (init.max_abs() == 0.0) throw std::invalid_argument("initial field must be nonzero");
  const H1Preconditioner precond(pr.grid(), pr.params().v0);

  std::vector<Field> starts{init};
  for (int k = 0; k < opts.restarts; ++k) {
    starts.push_back(perturbed_bump(pr.grid(), opts.seed + 1000 + static_cast<std::uint64_t>(k), opts.perturbation,
                                    1.0 + 0.25 * (k + 1)));
  }
  if (opts.fallback_direction) starts.push_back(*opts.fallback_direction);

  auto objective = [&](const Field& w) -> std::optional<DescentPoint> {
    auto r = reduced_energy(pr, w, lambda, branch);
    if (!r) return std::nullopt;
    // r(tw) = gradient / t and ‖tw‖ = t, so this is ‖r‖_{L²}/‖u‖.
    const double t2 = r->t * r->t;
    const double stat = std::sqrt(integrate_product(r->gradient, r->gradient)) / t2;
    return DescentPoint{r->value, std::move(r->gradient), 1.0 / t2, stat};
  };

  std::optional<SolverError> last_error;
  for (const Field& start : starts) {
    DescentResult res;
    try {
      res = sphere_descent(objective, start, pr.potential(), precond, opts.descent);
    } catch (const std::invalid_argument&) {
      last_error = SolverError(SolverError::Kind::no_roots, "initial direction cannot be projected onto N_lambda");
      continue;
    }
    if (!res.converged) {
      last_error = SolverError(SolverError::Kind::max_iterations,
                               std::string(to_string(branch)) + " descent did not converge (grad norm " +
                                   std::to_string(res.grad_norm) + " after " + std::to_string(res.iterations) +
                                   " iterations)");
      continue;
    }
    Field dir = res.u.abs();
    Field u;
    try {
      u = project_to_nehari(pr, dir, lambda, branch);
    } catch (const SolverError& e) {
      last_error = e;
      continue;
    }
    NehariSolution sol = describe_solution(pr, std::move(u), lambda);
    if (std::abs(sol.slope) > opts.slope_tol * sol.norm * sol.norm) {
      last_error = SolverError(SolverError::Kind::max_iterations, "projected solution misses the Nehari tolerance");
      continue;
    }
    sol.iterations = res.iterations;
    sol.grad_norm_final = res.grad_norm;
    sol.history = res.history;
    return sol;
  }
  throw last_error.value_or(SolverError(SolverError::Kind::no_roots, "no start could be projected"));
}

}  // namespace

NehariSolution minimize_on_nplus(const Problem& pr, double lambda, const Field& init, const SolverOptions& opts) {
  return solve_branch(pr, lambda, init, opts, Branch::plus);
}

NehariSolution minimize_on_nminus(const Problem& pr, double lambda, const Field& init, const SolverOptions& opts) {
  return solve_branch(pr, lambda, init, opts, Branch::minus);
}

bool TrichotomyReport::all_match() const {
  return !rows.empty() && std::all_of(rows.begin(), rows.end(), [](const TrichotomyRow& r) { return r.match; });
}

std::size_t TrichotomyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const TrichotomyRow& r) { return !r.error.empty(); }));
}

int predicted_energy_sign(double lambda, double lambda_lower) {
  const double r = lambda / lambda_lower;
  if (std::abs(r - 1.0) <= kTrichotomyBand) return 0;
  return r < 1.0 ? 1 : -1;
}

int observed_energy_sign(const NehariSolution& v) {
  if (std::abs(v.energy) <= kTrichotomyTol * v.norm * v.norm) return 0;
  return v.energy > 0.0 ? 1 : -1;
}

TrichotomyReport trichotomy_experiment(const Problem& pr, const std::vector<double>& lambdas, double lambda_lower,
                                       double lambda_star, const SolverOptions& opts) {
  TrichotomyReport rep;
  rep.lambda_star = lambda_star;
  rep.lambda_lower = lambda_lower;
  for (double lambda : lambdas) {
    TrichotomyRow row;
    row.lambda = lambda;
    row.lambda_over_lower = lambda / lambda_lower;
    row.predicted_sign = predicted_energy_sign(lambda, lambda_lower);
    try {
      if (!(lambda > 0.0 && lambda < lambda_star)) throw std::invalid_argument("lambda outside (0, lambda*)");
      row.u = minimize_on_nplus(pr, lambda, default_init(pr.grid(), Branch::plus), opts);
      row.v = minimize_on_nminus(pr, lambda, default_init(pr.grid(), Branch::minus, opts.seed), opts);
      row.observed_sign = observed_energy_sign(*row.v);
      row.distinctness = h1v_norm(row.u->field - row.v->field, pr.potential()) / row.u->norm;
      row.match = row.observed_sign == row.predicted_sign;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.match = false;
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

std::vector<double> default_trichotomy_lambdas(double lambda_lower, double lambda_star) {
  std::vector<double> out;
  for (double f : {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75}) {
    const double l = f * lambda_lower;
    if (l < lambda_star) out.push_back(l);
  }
  out.push_back(0.5 * (lambda_lower + lambda_star));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void to_json(nlohmann::json& j, const NehariSolution& s) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [k, v] : s.history) hist.push_back({k, v});
  j = nlohmann::json{{"lambda", s.lambda},
                     {"energy", s.energy},
                     {"slope", s.slope},
                     {"second", s.second},
                     {"residual_norm", s.residual_norm},
                     {"norm", s.norm},
                     {"manifold", to_string(s.manifold)},
                     {"positivity_min", s.positivity_min},
                     {"zero_nodes", s.zero_nodes},
                     {"iterations", s.iterations},
                     {"grad_norm_final", s.grad_norm_final},
                     {"history", std::move(hist)}};
}

void to_json(nlohmann::json& j, const TrichotomyReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  auto summary = [](const std::optional<NehariSolution>& s) -> nlohmann::json {
    if (!s) return nullptr;
    return {{"energy", s->energy},       {"second", s->second}, {"slope", s->slope},
            {"residual_norm", s->residual_norm}, {"norm", s->norm},   {"manifold", to_string(s->manifold)},
            {"iterations", s->iterations}};
  };
  for (const auto& row : r.rows) {
    nlohmann::json e = {{"lambda", row.lambda},
                        {"lambda_over_lambda_star", row.lambda_over_lower},
                        {"u", summary(row.u)},
                        {"v", summary(row.v)},
                        {"predicted_sign", row.predicted_sign},
                        {"observed_sign", row.v ? nlohmann::json(row.observed_sign) : nlohmann::json(nullptr)},
                        {"match", row.match}};
    if (row.u && row.v) e["distinctness"] = row.distinctness;
    if (!row.error.empty()) e["error"] = row.error;
    rows.push_back(std::move(e));
  }
  j = nlohmann::json{{"lambda_star", r.lambda_star},
                     {"lambda_star_lower", r.lambda_lower},
                     {"all_match", r.all_match()},
                     {"failures", r.failures()},
                     {"rows", std::move(rows)}};
}

void write_trichotomy_csv(const TrichotomyReport& r, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "lambda,lambda_over_lambda_star,J_u,J_v,second_u,second_v,predicted_sign,observed_sign,match\n";
  os << std::setprecision(17);
  auto opt = [&](const std::optional<NehariSolution>& s, double NehariSolution::*m) {
    if (s) {
      os << (*s).*m;
    } else {
      os << "nan";
    }
  };
  for (const auto& row : r.rows) {
    os << row.lambda << ',' << row.lambda_over_lower << ',';
    opt(row.u, &NehariSolution::energy);
    os << ',';
    opt(row.v, &NehariSolution::energy);
    os << ',';
    opt(row.u, &NehariSolution::second);
    os << ',';
    opt(row.v, &NehariSolution::second);
    os << ',' << row.predicted_sign << ',' << (row.v ? std::to_string(row.observed_sign) : std::string("nan")) << ','
       << (row.match ? "true" : "false") << '\n';
  }
}

}  // namespace swnehari
