#pragma once

// Estimates of the extremal parameters
//   λ* = inf_u Λ_n(u),   λ_* = inf_u Λ_e(u)
// by descent of log Λ on the H¹_V unit sphere (both are zero-homogeneous).

#include <cstdint>
#include <vector>

#include "swnehari/descent.hpp"
#include "swnehari/fibering.hpp"

namespace swnehari {

struct ExtremalEstimate {
  double value = 0.0;
  Field minimizer;  // unit H¹_V norm, nonnegative
  int iterations = 0;
  double grad_norm_final = 0.0;
  std::vector<std::pair<int, double>> history;
};

struct LogQuotient {
  double value;    // log Λ(u)
  Field gradient;  // L² representer of the first variation of log Λ
};

/// log Λ_n from the closed form, gradient assembled from ∇‖u‖² = 2(-Δu+Vu),
/// A'(u) = q a|u|^{q-2}u and B'(u) = 2p Φ[u] b|u|^{p-2}u.
LogQuotient log_lambda_n(const Problem& pr, const Field& u);

/// log Λ_e evaluated as R_e(w) at the scaled field w = t_e(u) u with its own
/// gradient: ∇Λ_e(u) = t_e ∇R_e(w), since t_e is stationary for t ↦ R_e(tu).
LogQuotient log_lambda_e(const Problem& pr, const Field& u);

ExtremalEstimate minimize_lambda_n(const Problem& pr, const Field& init, const DescentOptions& opts = {});
ExtremalEstimate minimize_lambda_e(const Problem& pr, const Field& init, const DescentOptions& opts = {});

/// L² norm of -2Δw + 2Vw - qλ a|w|^{q-2}w - 2p Φ[w] b|w|^{p-2}w at
/// w = t_n(u) u, the equation satisfied by a minimizer of Λ_n when λ = λ*.
double extremal_residual(const Problem& pr, const Field& minimizer, double lambda_star);

/// exp(-|x|²/(2 width²)).
Field gaussian_bump(const GridSpec& grid, double width = 1.0);
/// Bump times (1 + amplitude ξ), ξ uniform in [-1,1] from a seeded generator.
Field perturbed_bump(const GridSpec& grid, std::uint64_t seed, double amplitude, double width = 1.0);

struct MultistartOptions {
  DescentOptions descent;
  int starts = 5;
  std::uint64_t seed = 1;
  double perturbation = 0.1;
};

struct MultistartEstimate {
  ExtremalEstimate best;
  std::vector<double> values;
  double relative_spread = 0.0;  // (max - min)/min over starts
};

/// First start is the plain bump, the rest are seeded perturbations.
MultistartEstimate estimate_lambda_star(const Problem& pr, const MultistartOptions& opts = {});
MultistartEstimate estimate_lambda_lower(const Problem& pr, const MultistartOptions& opts = {});

void to_json(nlohmann::json& j, const ExtremalEstimate& e);

}  // namespace swnehari
