#pragma once

// The two positive solutions for 0 < λ < λ*: the ground state on N_λ⁺ and the
// bound state on N_λ⁻. Directions w on the H¹_V unit sphere are projected by
// w ↦ t^±(w) w, where t^± are the roots of Q_n(t) = λ, and the reduced energy
// w ↦ J_λ(t^±(w) w) is minimized by sphere descent.

#include <optional>
#include <string>
#include <vector>

#include "swnehari/descent.hpp"
#include "swnehari/fibering.hpp"

namespace swnehari {

enum class Branch { plus, minus };

const char* to_string(Branch b);

struct NehariSolution {
  Field field;
  double lambda = 0.0;
  double energy = 0.0;
  double slope = 0.0;
  double second = 0.0;
  double residual_norm = 0.0;
  double norm = 0.0;
  Manifold manifold = Manifold::off_manifold;
  double positivity_min = 0.0;
  std::size_t zero_nodes = 0;
  int iterations = 0;
  double grad_norm_final = 0.0;
  std::vector<std::pair<int, double>> history;
};

struct SolverOptions {
  DescentOptions descent{1e-7, 10000};
  double slope_tol = 1e-10;
  int restarts = 3;
  std::uint64_t seed = 7;
  double perturbation = 0.1;
  /// Tried after the seeded restarts, e.g. the Λ_n minimizer (Λ_n > λ there).
  std::optional<Field> fallback_direction;
};

/// Reduced energy F(w) = J_λ(t^± w) on a direction; nullopt when Λ_n(w) <= λ.
struct ReducedEnergy {
  double value;
  double t;        // projection scale t^±(w)
  Field gradient;  // L² representer: t² Mw - λ t^q a|w|^{q-2}w - t^{2p} Φ[w] b|w|^{p-2}w
};

std::optional<ReducedEnergy> reduced_energy(const Problem& pr, const Field& w, double lambda, Branch branch);

/// t^±(w) w; throws SolverError(no_roots) when w cannot be projected.
Field project_to_nehari(const Problem& pr, const Field& w, double lambda, Branch branch);

/// Evaluates every NehariSolution diagnostic for a field taken as is.
NehariSolution describe_solution(const Problem& pr, Field u, double lambda);

NehariSolution minimize_on_nplus(const Problem& pr, double lambda, const Field& init, const SolverOptions& opts = {});
NehariSolution minimize_on_nminus(const Problem& pr, double lambda, const Field& init, const SolverOptions& opts = {});

/// Default initial data: the Gaussian bump for N⁺, the bump with a seeded
/// perturbation for N⁻.
Field default_init(const GridSpec& grid, Branch branch, std::uint64_t seed = 7);

struct TrichotomyRow {
  double lambda = 0.0;
  double lambda_over_lower = 0.0;  // λ / λ̂_*
  std::optional<NehariSolution> u;
  std::optional<NehariSolution> v;
  int predicted_sign = 0;
  int observed_sign = 0;
  bool match = false;
  double distinctness = 0.0;  // ‖u − v‖ / ‖u‖
  std::string error;
};

struct TrichotomyReport {
  double lambda_star = 0.0;
  double lambda_lower = 0.0;
  std::vector<TrichotomyRow> rows;

  bool all_match() const;
  std::size_t failures() const;
};

/// Relative position of λ to λ̂_* inside which the zero-energy regime is predicted.
inline constexpr double kTrichotomyBand = 1e-9;
/// |J_λ(v)| <= tol ‖v‖² counts as zero energy.
inline constexpr double kTrichotomyTol = 1e-3;

int predicted_energy_sign(double lambda, double lambda_lower);
int observed_energy_sign(const NehariSolution& v);

/// Per-λ failures are recorded in the row, not thrown.
TrichotomyReport trichotomy_experiment(const Problem& pr, const std::vector<double>& lambdas, double lambda_lower,
                                       double lambda_star, const SolverOptions& opts = {});

/// {0.25,...,1.75}·λ̂_* below λ̂*, plus the midpoint (λ̂_*+λ̂*)/2.
std::vector<double> default_trichotomy_lambdas(double lambda_lower, double lambda_star);

void to_json(nlohmann::json& j, const NehariSolution& s);
void to_json(nlohmann::json& j, const TrichotomyReport& r);
void write_trichotomy_csv(const TrichotomyReport& r, const std::string& path);

}  // namespace swnehari
