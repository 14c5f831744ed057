#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "swnehari/functional.hpp"
#include "swnehari/grid.hpp"
#include "swnehari/model.hpp"

namespace swnehari::testing {

inline double rel_err(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

/// Uniform entries in [lo, hi].
inline Field random_field(const GridSpec& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Field f(g);
  for (auto& v : f.values()) v = d(rng);
  return f;
}

/// Smooth positive bump times a random positive factor, nonzero everywhere.
inline Field random_bump(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.5, 1.5);
  const double w = d(rng);
  Field f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point x = g.node(i);
    f[i] = d(rng) * std::exp(-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (2.0 * w * w));
  }
  return f;
}

inline GridSpec grid3(int m, double l = 4.0) { return GridSpec{l, m, 3}; }

}  // namespace swnehari::testing
