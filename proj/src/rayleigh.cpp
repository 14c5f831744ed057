#include "swnehari/rayleigh.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "swnehari/errors.hpp"

namespace swnehari {

LogQuotient log_lambda_n(const Problem& pr, const Field& u) {
  const double p = pr.p();
  const double q = pr.q();
  FieldTerms t = field_terms(pr, u);
  const FiberTriple tr{t.norm_sq, t.A_val, t.B_val};
  const double es = (2.0 * p - q) / (2.0 * (p - 1.0));
  const double eb = (2.0 - q) / (2.0 * p - 2.0);
  const double value = std::log(lambda_n(tr, p, q));

  Field g = (2.0 * es / t.norm_sq) * t.h1v;
  g.axpy(-q / t.A_val, t.concave);
  g.axpy(-eb * 2.0 * p / t.B_val, t.nonlocal);
  return {value, std::move(g)};
}

LogQuotient log_lambda_e(const Problem& pr, const Field& u) {
  const double p = pr.p();
  const double q = pr.q();
  const double te = t_e(fiber_triple(pr, u), p, q);
  const Field w = te * u;
  FieldTerms t = field_terms(pr, w);
  const FiberTriple tw{t.norm_sq, t.A_val, t.B_val};
  const double re = rayleigh_e(tw, p, q);
  const double num = 0.5 * t.norm_sq - t.B_val / (2.0 * p);

  // ∇R_e(w) = q [ (Mw - Φ b|w|^{p-2}w)/A - num q a|w|^{q-2}w / A² ]
  Field grad_re = (q / t.A_val) * t.h1v;
  grad_re.axpy(-q / t.A_val, t.nonlocal);
  grad_re.axpy(-q * num * q / (t.A_val * t.A_val), t.concave);
  Field g = (te / re) * grad_re;
  return {std::log(re), std::move(g)};
}

namespace {

template <class Quotient>
ExtremalEstimate minimize_quotient(const Problem& pr, const Field& init, const DescentOptions& opts, Quotient quotient,
                                   const char* name) {
  if (init.max_abs() == 0.0) throw std::invalid_argument("initial field must be nonzero");
  const H1Preconditioner precond(pr.grid(), pr.params().v0);
  auto objective = [&](const Field& u) -> std::optional<DescentPoint> {
    auto lq = quotient(pr, u);
    if (!std::isfinite(lq.value)) return std::nullopt;
    return DescentPoint{lq.value, std::move(lq.gradient), 1.0, std::nullopt};
  };
  const DescentResult res = sphere_descent(objective, init, pr.potential(), precond, opts);
  if (!std::isfinite(res.value)) {
    throw SolverError(SolverError::Kind::nonfinite_value, std::string(name) + " is not finite");
  }
  if (!res.converged) {
    throw SolverError(SolverError::Kind::max_iterations,
                      std::string(name) + " minimization did not converge (grad norm " + std::to_string(res.grad_norm) +
                          " after " + std::to_string(res.iterations) + " iterations)");
  }
  ExtremalEstimate est;
  Field m = res.u.abs();
  m *= 1.0 / h1v_norm(m, pr.potential());
  est.value = std::exp(quotient(pr, m).value);
  est.minimizer = std::move(m);
  est.iterations = res.iterations;
  est.grad_norm_final = res.grad_norm;
  est.history.reserve(res.history.size());
  for (const auto& [k, v] : res.history) est.history.emplace_back(k, std::exp(v));
  return est;
}

}  // namespace

ExtremalEstimate minimize_lambda_n(const Problem& pr, const Field& init, const DescentOptions& opts) {
  return minimize_quotient(pr, init, opts, log_lambda_n, "Lambda_n");
}

ExtremalEstimate minimize_lambda_e(const Problem& pr, const Field& init, const DescentOptions& opts) {
  return minimize_quotient(pr, init, opts, log_lambda_e, "Lambda_e");
}

double extremal_residual(const Problem& pr, const Field& minimizer, double lambda_star) {
  const double tn = t_n(fiber_triple(pr, minimizer), pr.p(), pr.q());
  const Field w = tn * minimizer;
  FieldTerms t = field_terms(pr, w);
  Field r = 2.0 * t.h1v;
  r.axpy(-pr.q() * lambda_star, t.concave);
  r.axpy(-2.0 * pr.p(), t.nonlocal);
  return std::sqrt(integrate_product(r, r));
}

Field gaussian_bump(const GridSpec& grid, double width) {
  const double inv = 1.0 / (2.0 * width * width);
  return Field::from_function(grid, [inv](const Point& x) {
    return std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) * inv);
  });
}

Field perturbed_bump(const GridSpec& grid, std::uint64_t seed, double amplitude, double width) {
  Field f = gaussian_bump(grid, width);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xi(-1.0, 1.0);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= 1.0 + amplitude * xi(rng);
  return f;
}

namespace {

template <class Minimize>
MultistartEstimate multistart(const Problem& pr, const MultistartOptions& opts, Minimize minimize) {
  MultistartEstimate out;
  bool have = false;
  for (int k = 0; k < std::max(1, opts.starts); ++k) {
    const Field init =
        k == 0 ? gaussian_bump(pr.grid()) : perturbed_bump(pr.grid(), opts.seed + static_cast<std::uint64_t>(k), opts.perturbation);
    ExtremalEstimate est = minimize(pr, init, opts.descent);
    out.values.push_back(est.value);
    if (!have || est.value < out.best.value) {
      out.best = std::move(est);
      have = true;
    }
  }
  const auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
  out.relative_spread = (*hi - *lo) / *lo;
  return out;
}

}  // namespace

MultistartEstimate estimate_lambda_star(const Problem& pr, const MultistartOptions& opts) {
  return multistart(pr, opts, minimize_lambda_n);
}

MultistartEstimate estimate_lambda_lower(const Problem& pr, const MultistartOptions& opts) {
  return multistart(pr, opts, minimize_lambda_e);
}

void to_json(nlohmann::json& j, const ExtremalEstimate& e) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [k, v] : e.history) hist.push_back({k, v});
  j = nlohmann::json{{"value", e.value},
                     {"iterations", e.iterations},
                     {"grad_norm_final", e.grad_norm_final},
                     {"history", std::move(hist)}};
}

}  // namespace swnehari
