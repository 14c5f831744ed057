#pragma once

// The doubly weighted nonlocal term
//   B(u) = ∫∫ f(x) |x-y|^{-μ} f(y) dx dy,   f = b |u|^p |x|^{-α},
// its Choquard field Φ[u](x) = |x|^{-α} ∫ |x-y|^{-μ} b(y)|u(y)|^p |y|^{-α} dy
// and the pairing D(u,φ) = ∫ Φ[u] b |u|^{p-2} u φ.
//
// The fast path is a zero-padded (linear) FFT convolution; the *_oracle
// functions evaluate the same discrete double sum directly.

#include <memory>
#include <vector>

#include "swnehari/grid.hpp"

namespace swnehari {

struct NonlocalParams {
  double alpha = 0.25;
  double mu = 1.0;
  double p = 2.5;
};

/// (1/h^d) ∫_{[-h/2,h/2]^d} |z|^{-μ} dz, the cell average of the singular
/// kernel used as its value at zero offset. Requires 0 <= μ < d.
double cell_averaged_kernel(int dim, double h, double mu);

/// Discrete Riesz kernel K(z) = |z|^{-μ} on a grid, with its spectral
/// representation on the 2M-padded grid. Immutable and shareable.
class RieszKernel {
 public:
  /// Cached per (grid, μ).
  static std::shared_ptr<const RieszKernel> get(const GridSpec& grid, double mu);

  RieszKernel(const GridSpec& grid, double mu);
  ~RieszKernel();
  RieszKernel(const RieszKernel&) = delete;
  RieszKernel& operator=(const RieszKernel&) = delete;

  const GridSpec& grid() const { return grid_; }
  double mu() const { return mu_; }
  double diag_value() const { return diag_; }

  /// K at integer node offset (dx, dy, dz); diag_value at zero offset.
  double at_offset(const std::array<int, 3>& offset) const;

  /// g(x) = h^d Σ_y K(x-y) f(y).
  Field convolve(const Field& f) const;

 private:
  struct Impl;
  GridSpec grid_;
  double mu_;
  double diag_;
  std::unique_ptr<Impl> impl_;
};

/// |x|^{-α} sampled at grid nodes.
Field radial_weight(const GridSpec& grid, double alpha);

/// f = b |u|^p |x|^{-α}.
Field weighted_density(const Field& u, const Field& b, double alpha, double p);

Field riesz_convolve(const Field& f, const RieszKernel& kernel);

/// Bundles the sampled b, the weight |x|^{-α} and the kernel so repeated
/// evaluations share precomputation.
class SteinWeissTerm {
 public:
  SteinWeissTerm(const Field& b, const NonlocalParams& params);

  const NonlocalParams& params() const { return params_; }
  const Field& b() const { return b_; }
  const Field& weight() const { return weight_; }
  const RieszKernel& kernel() const { return *kernel_; }

  Field density(const Field& u) const;
  /// Φ[u] >= 0.
  Field choquard_field(const Field& u) const;
  double energy(const Field& u) const;              // B(u)
  double pairing(const Field& u, const Field& phi) const;  // D(u, φ)
  /// b |u|^{p-2} u, zero where u = 0.
  Field nonlinearity(const Field& u) const;

  /// B(u) together with Φ[u], from a single convolution.
  struct Evaluation {
    double energy;
    Field choquard;
  };
  Evaluation evaluate(const Field& u) const;

 private:
  NonlocalParams params_;
  Field b_;
  Field weight_;
  std::shared_ptr<const RieszKernel> kernel_;
};

Field choquard_field(const Field& u, const Field& b, const NonlocalParams& params);
double nonlocal_energy(const Field& u, const Field& b, const NonlocalParams& params);            // B
double nonlocal_pairing(const Field& u, const Field& phi, const Field& b, const NonlocalParams& params);  // D

/// Largest grid accepted by the O(n²) oracles.
inline constexpr std::size_t kOracleMaxNodes = 1024;

/// Direct double sums; throw std::invalid_argument above kOracleMaxNodes.
double nonlocal_energy_oracle(const Field& u, const Field& b, const NonlocalParams& params);
double nonlocal_pairing_oracle(const Field& u, const Field& phi, const Field& b, const NonlocalParams& params);
Field choquard_field_oracle(const Field& u, const Field& b, const NonlocalParams& params);
Field riesz_convolve_oracle(const Field& f, const RieszKernel& kernel);

}  // namespace swnehari
