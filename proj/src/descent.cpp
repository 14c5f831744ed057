#include "swnehari/descent.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace swnehari {

namespace {

Field normalized(const Field& u, const Field& potential) {
  const double n = h1v_norm(u, potential);
  return (1.0 / n) * u;
}

}  // namespace

DescentResult sphere_descent(const SphereObjective& objective, const Field& init, const Field& potential,
                             const H1Preconditioner& precond, const DescentOptions& opts) {
  DescentResult res;
  res.u = normalized(init, potential);
  auto current = objective(res.u);
  if (!current) throw std::invalid_argument("objective is infeasible at the initial point");
  res.value = current->value;
  res.history.emplace_back(0, res.value);

  double step = opts.initial_step;
  std::deque<double> recent{current->value};
  const std::size_t window =
      opts.method == DescentMethod::barzilai_borwein ? static_cast<std::size_t>(std::max(1, opts.nonmonotone_window)) : 1;
  for (int it = 0;; ++it) {
    const Field pg = precond.apply(current->gradient);
    const double gpg = integrate_product(current->gradient, pg);
    res.grad_norm = current->stationarity ? *current->stationarity : std::sqrt(std::max(gpg, 0.0)) * current->scale;
    res.iterations = it;
    if (!std::isfinite(res.grad_norm)) break;
    if (res.grad_norm <= opts.tol) {
      res.converged = true;
      break;
    }
    if (it >= opts.max_iter) break;

    // Preconditioned steepest descent, projected onto the tangent space
    // <u, d>_V = 0.
    Field dir = (-current->scale) * pg;
    const Field mu = h1v_apply(res.u, potential);
    dir.axpy(-integrate_product(mu, dir), res.u);
    const double slope = integrate_product(current->gradient, dir);
    if (!(slope < 0.0)) {
      res.stalled = true;
      break;
    }
    const double reference = *std::max_element(recent.begin(), recent.end());

    bool accepted = false;
    double taken = step;
    std::optional<DescentPoint> next;
    Field trial;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      trial = res.u;
      trial.axpy(taken, dir);
      trial = normalized(trial, potential);
      next = objective(trial);
      if (next && std::isfinite(next->value) && next->value <= reference + opts.armijo_c * taken * slope) {
        accepted = true;
        break;
      }
      taken *= opts.shrink;
    }
    if (!accepted) {
      res.stalled = true;
      break;
    }

    double bb = 0.0;
    if (opts.method == DescentMethod::barzilai_borwein) {
      const Field s = trial - res.u;
      Field y = next->scale * next->gradient;
      y.axpy(-current->scale, current->gradient);
      const double sy = integrate_product(s, y);
      if (sy > 0.0) bb = h1v_inner(s, s, potential) / sy;
    }
    res.u = std::move(trial);
    current = std::move(next);
    res.value = current->value;
    res.history.emplace_back(it + 1, res.value);
    recent.push_back(current->value);
    if (recent.size() > window) recent.pop_front();
    step = bb > 0.0 ? bb : taken / opts.shrink;
    step = std::clamp(step, 1e-12, opts.max_step);
  }
  res.value = current->value;
  return res;
}

}  // namespace swnehari
