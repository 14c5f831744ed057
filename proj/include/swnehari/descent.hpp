#pragma once

// Preconditioned projected-gradient descent on the H¹_V unit sphere
// {u : <u,u>_V = 1}, shared by the extremal-value and Nehari minimizations.
// Objectives are expected to be zero-homogeneous, so the retraction
// u ↦ u/‖u‖ does not change their value.

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "swnehari/grid.hpp"

namespace swnehari {

enum class DescentMethod {
  steepest,          // warm-started step, monotone Armijo
  barzilai_borwein,  // BB1 trial step, Armijo against the max of recent values
};

struct DescentOptions {
  double tol = 1e-7;
  int max_iter = 5000;
  double armijo_c = 1e-4;
  double shrink = 0.5;
  double initial_step = 1.0;
  double max_step = 1e6;
  int max_backtracks = 80;
  int nonmonotone_window = 1;  // barzilai_borwein only; 1 keeps descent monotone
  DescentMethod method = DescentMethod::barzilai_borwein;
};

struct DescentPoint {
  double value;
  Field gradient;  // L² representer: directional derivative = integrate(gradient·φ)
  double scale = 1.0;  // multiplies the preconditioned direction and its norm
  /// When set, compared against tol instead of the scaled preconditioned norm.
  std::optional<double> stationarity;
};

/// nullopt marks an infeasible point; the line search treats it as +∞.
using SphereObjective = std::function<std::optional<DescentPoint>(const Field& unit_u)>;

struct DescentResult {
  Field u;
  double value = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  bool converged = false;
  bool stalled = false;  // line search exhausted before reaching tol
  std::vector<std::pair<int, double>> history;
};

/// Throws std::invalid_argument when the objective is infeasible at init.
DescentResult sphere_descent(const SphereObjective& objective, const Field& init, const Field& potential,
                             const H1Preconditioner& precond, const DescentOptions& opts);

}  // namespace swnehari
