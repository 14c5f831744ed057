#include "swnehari/functional.hpp"

#include <cmath>
#include <stdexcept>

namespace swnehari {

namespace {

Field sample(const GridSpec& grid, const std::function<double(const Point&)>& f) {
  return Field::from_function(grid, f);
}

}  // namespace

Problem::Problem(const ModelParams& params, const GridSpec& grid)
    : Problem(params,
              sample(grid, [&](const Point& x) { return eval_confining(params, std::span(x.data(), grid.dim)); }),
              sample(grid, [&](const Point& x) { return eval_potential(weight_a(params), std::span(x.data(), grid.dim)); }),
              sample(grid, [&](const Point& x) { return eval_potential(weight_b(params), std::span(x.data(), grid.dim)); })) {}

Problem::Problem(const ModelParams& params, Field potential, Field a, Field b)
    : params_(params),
      grid_(potential.grid()),
      potential_(std::move(potential)),
      a_(std::move(a)),
      nonlocal_(b, NonlocalParams{params.alpha, params.mu, params.p}) {
  grid_.validate();
  require_same_grid(potential_, a_);
  require_same_grid(potential_, nonlocal_.b());
}

Field concave_nonlinearity(const Field& u, const Field& a, double q) {
  require_same_grid(u, a);
  Field out(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u[i];
    if (v == 0.0) continue;
    out[i] = a[i] * std::copysign(std::pow(std::abs(v), q - 1.0), v);
  }
  return out;
}

double concave_energy(const Field& u, const Field& a, double q) {
  require_same_grid(u, a);
  Field f(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) f[i] = a[i] * std::pow(std::abs(u[i]), q);
  return integrate(f);
}

double concave_pairing(const Field& u, const Field& phi, const Field& a, double q) {
  return integrate_product(concave_nonlinearity(u, a, q), phi);
}

EnergyBreakdown energy(const Problem& pr, const Field& u, double lambda) {
  EnergyBreakdown e;
  e.norm_sq = h1v_inner(u, u, pr.potential());
  e.A_val = concave_energy(u, pr.a(), pr.q());
  e.B_val = pr.nonlocal().energy(u);
  e.J_val = 0.5 * e.norm_sq - lambda / pr.q() * e.A_val - e.B_val / (2.0 * pr.p());
  return e;
}

double slope(const Problem& pr, const Field& u, double lambda) {
  const auto e = energy(pr, u, lambda);
  return e.norm_sq - lambda * e.A_val - e.B_val;
}

double second_along(const Problem& pr, const Field& u, double lambda) {
  const auto e = energy(pr, u, lambda);
  return e.norm_sq - lambda * (pr.q() - 1.0) * e.A_val - (2.0 * pr.p() - 1.0) * e.B_val;
}

double first_variation(const Problem& pr, const Field& u, const Field& phi, double lambda) {
  return h1v_inner(u, phi, pr.potential()) - lambda * concave_pairing(u, phi, pr.a(), pr.q()) -
         pr.nonlocal().pairing(u, phi);
}

FieldTerms field_terms(const Problem& pr, const Field& u) {
  auto nl = pr.nonlocal().evaluate(u);
  Field h1v = h1v_apply(u, pr.potential());
  const double norm_sq = integrate_product(h1v, u);
  Field conc = concave_nonlinearity(u, pr.a(), pr.q());
  double A_val = concave_energy(u, pr.a(), pr.q());
  Field nonlocal = nl.choquard.times(pr.nonlocal().nonlinearity(u));
  return {norm_sq, A_val, nl.energy, std::move(h1v), std::move(conc), std::move(nonlocal)};
}

Field residual(const Problem& pr, const Field& u, double lambda) {
  FieldTerms t = field_terms(pr, u);
  Field r = std::move(t.h1v);
  r.axpy(-lambda, t.concave);
  r -= t.nonlocal;
  return r;
}

double residual_norm(const Problem& pr, const Field& u, double lambda) {
  const Field r = residual(pr, u, lambda);
  return std::sqrt(integrate_product(r, r));
}

std::size_t count_zero_nodes(const Field& u) {
  std::size_t n = 0;
  for (double v : u.values()) n += v == 0.0;
  return n;
}

void to_json(nlohmann::json& j, const EnergyBreakdown& e) {
  j = nlohmann::json{{"norm_sq", e.norm_sq}, {"A", e.A_val}, {"B", e.B_val}, {"J", e.J_val}};
}

}  // namespace swnehari
