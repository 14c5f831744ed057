#pragma once

// Cell-centered tensor grid on the box [-L, L]^d and real fields sampled on
// it. Nodes sit at -L + (i + 1/2) h, h = 2L/M, so the origin is never a node.
// Storage is row-major with the last axis fastest.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "swnehari/model.hpp"

namespace swnehari {

struct GridSpec {
  double half_width = 4.0;
  int points_per_axis = 16;
  int dim = 3;

  /// Throws std::invalid_argument on L <= 0, odd M, M < 4 or d ∉ {1,2,3}.
  void validate() const;

  double h() const { return 2.0 * half_width / points_per_axis; }
  double cell_volume() const;
  std::size_t size() const;
  double coord(int i) const { return -half_width + (i + 0.5) * h(); }

  /// Node coordinates; unused trailing components are zero.
  Point node(std::size_t flat) const;
  std::array<int, 3> index(std::size_t flat) const;
  std::size_t flat(const std::array<int, 3>& idx) const;

  bool operator==(const GridSpec& other) const = default;
};

class Field {
 public:
  Field() = default;
  explicit Field(const GridSpec& grid, double fill = 0.0);
  /// Throws std::invalid_argument on size mismatch or non-finite entries.
  Field(const GridSpec& grid, std::vector<double> values);

  static Field from_function(const GridSpec& grid, const std::function<double(const Point&)>& f);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  bool all_finite() const;
  double max_abs() const;
  double min() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(double s);
  /// this += s * o
  Field& axpy(double s, const Field& o);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator-(Field a) { return a *= -1.0; }

  Field abs() const;
  /// Elementwise product.
  Field times(const Field& o) const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

void require_same_grid(const Field& a, const Field& b);

/// Midpoint quadrature h^d Σ f_i with compensated summation in flat order.
double integrate(const Field& f);
/// integrate(f * g) without materializing the product.
double integrate_product(const Field& f, const Field& g);

/// Second-order central differences; one-sided second-order stencils on the
/// two boundary layers of each axis.
std::vector<Field> gradient(const Field& f);

/// Adjoint of one gradient component: G_axis^T y.
Field gradient_adjoint(const Field& y, int axis);

/// Forward differences (u_{i+1} - u_i)/h on the M-1 interior edges of each
/// axis, stored at the lower node; the last layer of each axis is zero.
std::vector<Field> edge_differences(const Field& f);

/// Discrete -Δ: the adjoint of edge_differences under midpoint quadrature
/// (the compact 2d+1 point stencil with natural boundary conditions), so
/// integrate(stiffness(u) w) = integrate(Σ_edges D u · D w).
Field stiffness(const Field& u);

/// H¹_V operator u ↦ -Δu + V u.
Field h1v_apply(const Field& u, const Field& potential);

/// <u,w> = integrate(Du·Dw + V u w) over edge differences.
double h1v_inner(const Field& u, const Field& w, const Field& potential);
double h1v_norm(const Field& u, const Field& potential);

/// Exact inverse of -Δ + v0 for the stiffness above, applied in the cosine
/// (DCT-II) basis that diagonalizes it. Symmetric positive definite; an
/// approximate inverse when V is not constant.
class H1Preconditioner {
 public:
  H1Preconditioner(const GridSpec& grid, double v0);
  ~H1Preconditioner();
  H1Preconditioner(const H1Preconditioner&) = delete;
  H1Preconditioner& operator=(const H1Preconditioner&) = delete;

  Field apply(const Field& g) const;

 private:
  struct Impl;
  GridSpec grid_;
  std::vector<double> inv_symbol_;
  std::unique_ptr<Impl> impl_;
};

// Serialization. Binary layout (little-endian): uint32 dim, float64 L,
// uint32 M, then M^d float64 values in row-major order.
void write_field_binary(const Field& f, const std::string& path);
Field read_field_binary(const std::string& path);
/// CSV with columns x0[,x1[,x2]],value.
void write_field_csv(const Field& f, const std::string& path);

}  // namespace swnehari
