#pragma once

// Discrete energy J_λ(u) = ½‖u‖² - (λ/q) A(u) - (1/2p) B(u) and its
// variations, on a sampled problem.

#include <memory>

#include "swnehari/grid.hpp"
#include "swnehari/model.hpp"
#include "swnehari/steinweiss.hpp"

namespace swnehari {

/// A model sampled on a grid: V, a, b, |x|^{-α} and the Riesz kernel.
class Problem {
 public:
  Problem(const ModelParams& params, const GridSpec& grid);
  /// Explicit samples, for tests and specializations outside the examples.
  Problem(const ModelParams& params, Field potential, Field a, Field b);

  const ModelParams& params() const { return params_; }
  const GridSpec& grid() const { return grid_; }
  const Field& potential() const { return potential_; }
  const Field& a() const { return a_; }
  const Field& b() const { return nonlocal_.b(); }
  const SteinWeissTerm& nonlocal() const { return nonlocal_; }
  double p() const { return params_.p; }
  double q() const { return params_.q; }

 private:
  ModelParams params_;
  GridSpec grid_;
  Field potential_;
  Field a_;
  SteinWeissTerm nonlocal_;
};

/// A(u) = ∫ a |u|^q.
double concave_energy(const Field& u, const Field& a, double q);
/// H(u,φ) = ∫ a |u|^{q-2} u φ, with the integrand taken as 0 where u = 0.
double concave_pairing(const Field& u, const Field& phi, const Field& a, double q);
/// a |u|^{q-2} u (0 where u = 0).
Field concave_nonlinearity(const Field& u, const Field& a, double q);

struct EnergyBreakdown {
  double norm_sq = 0.0;
  double A_val = 0.0;
  double B_val = 0.0;
  double J_val = 0.0;
};

EnergyBreakdown energy(const Problem& pr, const Field& u, double lambda);
/// J_λ'(u)u = ‖u‖² - λA(u) - B(u).
double slope(const Problem& pr, const Field& u, double lambda);
/// J_λ''(u)(u,u) = ‖u‖² - λ(q-1)A(u) - (2p-1)B(u).
double second_along(const Problem& pr, const Field& u, double lambda);
/// J_λ'(u)φ = <u,φ> - λH(u,φ) - D(u,φ).
double first_variation(const Problem& pr, const Field& u, const Field& phi, double lambda);

/// Strong-form residual r = -Δu + Vu - λ a|u|^{q-2}u - Φ[u] b|u|^{p-2}u,
/// whose L² pairing integrate(r φ) is exactly J_λ'(u)φ.
Field residual(const Problem& pr, const Field& u, double lambda);
double residual_norm(const Problem& pr, const Field& u, double lambda);

/// Everything a descent step needs from one convolution.
struct FieldTerms {
  double norm_sq;
  double A_val;
  double B_val;
  Field h1v;       // -Δu + Vu
  Field concave;   // a |u|^{q-2} u
  Field nonlocal;  // Φ[u] b |u|^{p-2} u
};

FieldTerms field_terms(const Problem& pr, const Field& u);

/// Counts nodes with u == 0 exactly (where the q = 1 integrand has a kink).
std::size_t count_zero_nodes(const Field& u);

void to_json(nlohmann::json& j, const EnergyBreakdown& e);

}  // namespace swnehari
