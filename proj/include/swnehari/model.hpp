#pragma once

// Continuum parameters of the weighted Choquard problem
//   -Δu + V u = λ a |u|^{q-2} u + |x|^{-α} (K_μ * (b |u|^p |y|^{-α})) b |u|^{p-2} u
// together with the closed-form hypothesis checks on (N, α, μ, p, q) and the
// potential families a, b, V.

#include <array>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace swnehari {

struct ModelParams {
  int dim_n = 3;
  double alpha = 0.25;
  double mu = 1.0;
  double p = 2.5;
  double q = 1.5;
  double lambda = 0.1;
  double v0 = 1.0;
  double v_inf = 1.0;
  double gamma1 = 2.0;  // decay of a(x) = (1+|x|^2)^{-gamma1}
  double gamma2 = 2.0;  // decay of b(x) = (1+|x|^2)^{-gamma2}
  double beta = 10.0;   // integrability index of b in (H4)
};

struct CriticalExponents {
  double lower;  // 2_{α,μ} = (2N-2α-μ)/N
  double upper;  // 2*_{α,μ} = (2N-2α-μ)/(N-2)
};

/// Throws std::invalid_argument when dim_n < 3.
CriticalExponents critical_exponents(const ModelParams& params);

struct IntegrabilityIndices {
  double r;      // 2*/(2*-q), exponent for a
  double sigma;  // 2N/(2N-2α-μ-p(N-2)), exponent for b
};

/// Throws std::invalid_argument when dim_n < 3 or p >= 2*_{α,μ}.
IntegrabilityIndices integrability_indices(const ModelParams& params);

/// Fixed enlargement factor used for the b ∈ L^{σ+η} membership check.
inline constexpr double kSigmaMargin = 1e-2;

struct HypothesisCheck {
  std::string hypothesis;  // "H1".."H4"
  std::string name;        // short machine-readable id, e.g. "q_range"
  std::string condition;   // human-readable inequality
  double value = 0.0;      // left-hand side
  double threshold = 0.0;  // right-hand side (or NaN when not a single bound)
  bool passed = false;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;

  bool all_passed() const;
  std::vector<std::string> failures() const;  // "H2:q_range" style ids
  const HypothesisCheck* find(const std::string& name) const;
};

/// Never throws; failures are recorded in the report.
ValidationReport validate_hypotheses(const ModelParams& params);

void to_json(nlohmann::json& j, const HypothesisCheck& c);
void to_json(nlohmann::json& j, const ValidationReport& r);
void to_json(nlohmann::json& j, const ModelParams& p);

enum class PotentialFamily { constant, inverse_quadratic_decay };

struct PotentialSpec {
  PotentialFamily family = PotentialFamily::constant;
  double coefficient = 1.0;
  double decay = 0.0;

  /// Throws std::invalid_argument unless coefficient > 0 and decay >= 0.
  void validate() const;
};

using Point = std::array<double, 3>;

/// c (1+|x|^2)^{-γ} for the decay family, c for the constant family.
double eval_potential(const PotentialSpec& spec, std::span<const double> x);

PotentialSpec weight_a(const ModelParams& params);  // Example family with γ₁
PotentialSpec weight_b(const ModelParams& params);  // Example family with γ₂

/// Bounded potential V with V(0)=v0 rising monotonically to v_inf at infinity;
/// constant v0 when v0 == v_inf.
double eval_confining(const ModelParams& params, std::span<const double> x);

}  // namespace swnehari
