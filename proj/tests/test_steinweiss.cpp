#include <cmath>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "swnehari/steinweiss.hpp"

using namespace swnehari;
using namespace swnehari::testing;
using doctest::Approx;

namespace {

// Composite Gauss-Legendre (5 points per panel) on [lo, hi].
template <class F>
double gauss(F f, double lo, double hi, int panels = 200) {
  static const double x[] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  static const double w[] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                             0.2369268850561891};
  const double dh = (hi - lo) / panels;
  double s = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double c = lo + (k + 0.5) * dh;
    for (int j = 0; j < 5; ++j) s += w[j] * f(c + 0.5 * dh * x[j]);
  }
  return 0.5 * dh * s;
}

// Cell average of |z|^{-mu} over [-a,a]^d with a = h/2, reduced by Euler's
// identity for degree -mu homogeneous functions to a smooth integral over
// the boundary: ∫_cube f = (1/(d - mu)) ∫_∂cube f x·n.
double cube_average_oracle(int d, double h, double mu) {
  const double a = 0.5 * h;
  double integral = 0.0;
  if (d == 1) {
    integral = 2.0 * std::pow(a, 1.0 - mu) / (1.0 - mu);
  } else if (d == 2) {
    integral = 4.0 * a / (2.0 - mu) * gauss([&](double y) { return std::pow(a * a + y * y, -0.5 * mu); }, -a, a);
  } else {
    integral = 6.0 * a / (3.0 - mu) * gauss(
                                          [&](double y) {
                                            return gauss([&](double z) { return std::pow(a * a + y * y + z * z, -0.5 * mu); },
                                                         -a, a, 60);
                                          },
                                          -a, a, 60);
  }
  return integral / std::pow(h, d);
}

struct ParamCase {
  NonlocalParams params;
  double gamma2;
};

const ParamCase kCases[] = {
    {{0.25, 1.0, 2.5}, 2.0},
    {{0.1, 0.5, 2.2}, 1.5},
    {{0.6, 1.6, 3.0}, 3.0},
};

Field weight_b_field(const GridSpec& g, double gamma2) {
  return Field::from_function(g, [&](const Point& x) {
    return std::pow(1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2], -gamma2);
  });
}

}  // namespace

TEST_CASE("cell averaged kernel against the boundary-integral oracle") {
  for (int d : {1, 2, 3})
    for (double mu : {0.3, 1.0, 0.9 * d})
      for (double h : {0.25, 1.0}) {
        if (mu >= d) continue;
        const double got = cell_averaged_kernel(d, h, mu);
        const double want = cube_average_oracle(d, h, mu);
        CHECK_MESSAGE(rel_err(got, want) < 1e-8, "d=" << d << " mu=" << mu << " h=" << h);
        CHECK(got > 0.0);
      }
  // Scaling: the average of a degree -mu function scales like h^{-mu}.
  CHECK(cell_averaged_kernel(3, 0.5, 1.0) == Approx(2.0 * cell_averaged_kernel(3, 1.0, 1.0)).epsilon(1e-10));
  CHECK_THROWS(cell_averaged_kernel(3, 1.0, 3.0));
}

TEST_CASE("kernel samples") {
  const GridSpec g{2.0, 8, 3};
  const auto k = RieszKernel::get(g, 1.0);
  CHECK(k == RieszKernel::get(g, 1.0));
  CHECK(k != RieszKernel::get(g, 0.5));
  CHECK(k->diag_value() == cell_averaged_kernel(3, g.h(), 1.0));
  CHECK(k->at_offset({0, 0, 0}) == k->diag_value());
  CHECK(k->at_offset({1, 0, 0}) == Approx(1.0 / g.h()));
  CHECK(k->at_offset({1, -2, 2}) == Approx(1.0 / (3.0 * g.h())));
  // Monotone decay with distance, and the diagonal exceeds every neighbour.
  double prev = k->diag_value();
  for (int r = 1; r < 8; ++r) {
    const double v = k->at_offset({r, 0, 0});
    CHECK(v < prev);
    CHECK(k->at_offset({r, r, 0}) < v);
    prev = v;
  }
}

TEST_CASE("weighted density") {
  const GridSpec g{2.0, 8, 3};
  std::mt19937_64 rng(1);
  const Field u = random_field(g, rng);
  const Field b = random_field(g, rng, 0.1, 1.0);
  for (double v : weighted_density(Field(g), b, 0.25, 2.5).values()) CHECK(v == 0.0);
  const Field sq = weighted_density(u, Field(g, 1.0), 0.0, 2.0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(sq[i] == Approx(u[i] * u[i]).epsilon(1e-14));
  const Field f1 = weighted_density(u, b, 0.3, 2.5), f2 = weighted_density(u.abs(), b, 0.3, 2.5);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(f1[i] == f2[i]);
  const Field w = radial_weight(g, 0.3);
  const Point x = g.node(7);
  CHECK(w[7] == Approx(std::pow(std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]), -0.3)));
}

TEST_CASE("convolution of a discrete delta reproduces the kernel") {
  const GridSpec g{2.0, 8, 3};
  const auto k = RieszKernel::get(g, 1.0);
  const std::array<int, 3> x0{2, 5, 3};
  Field delta(g);
  delta[g.flat(x0)] = 1.0 / g.cell_volume();
  const Field out = riesz_convolve(delta, *k);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.index(i);
    const double want = k->at_offset({idx[0] - x0[0], idx[1] - x0[1], idx[2] - x0[2]});
    CHECK(out[i] == Approx(want).epsilon(1e-11));
  }
  CHECK(out[g.flat(x0)] == Approx(k->diag_value()).epsilon(1e-12));
}

TEST_CASE("convolution is translation equivariant") {
  const GridSpec g{2.0, 8, 3};
  const auto k = RieszKernel::get(g, 0.7);
  std::mt19937_64 rng(8);
  Field f(g), fs(g);
  // Support inside [1,5]^3 so the shift stays inside the box.
  for (int i = 1; i < 6; ++i)
    for (int j = 1; j < 6; ++j)
      for (int l = 1; l < 6; ++l) {
        const double v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        f[g.flat({i, j, l})] = v;
        fs[g.flat({i + 1, j, l})] = v;
      }
  const Field a = riesz_convolve(f, *k), b = riesz_convolve(fs, *k);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 8; ++j)
      for (int l = 0; l < 8; ++l) CHECK(b[g.flat({i + 1, j, l})] == Approx(a[g.flat({i, j, l})]).epsilon(1e-12));
}

TEST_CASE("fast convolution matches the direct double sum") {
  std::mt19937_64 rng(13);
  for (const GridSpec& g : {GridSpec{2.0, 8, 3}, GridSpec{3.0, 16, 2}, GridSpec{1.0, 32, 1}})
    for (double mu : {0.4, 0.9}) {
      const auto k = RieszKernel::get(g, mu);
      for (int r = 0; r < 3; ++r) {
        const Field f = random_field(g, rng);
        const Field fast = riesz_convolve(f, *k), slow = riesz_convolve_oracle(f, *k);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
          num = std::max(num, std::abs(fast[i] - slow[i]));
          den = std::max(den, std::abs(slow[i]));
        }
        CHECK(num / den < 1e-10);
      }
    }
  CHECK_THROWS_AS(riesz_convolve_oracle(Field(GridSpec{2.0, 12, 3}), *RieszKernel::get(GridSpec{2.0, 12, 3}, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("B, D and the Choquard field match the oracles") {
  const GridSpec g{3.0, 8, 3};
  std::mt19937_64 rng(17);
  int fields = 0;
  for (const auto& c : kCases) {
    const Field b = weight_b_field(g, c.gamma2);
    for (int r = 0; r < 8; ++r, ++fields) {
      const Field u = r % 2 ? random_field(g, rng) : random_bump(g, rng);
      const Field phi = random_field(g, rng);
      CHECK(rel_err(nonlocal_energy(u, b, c.params), nonlocal_energy_oracle(u, b, c.params)) < 1e-10);
      CHECK(rel_err(nonlocal_pairing(u, phi, b, c.params), nonlocal_pairing_oracle(u, phi, b, c.params)) < 1e-10);
      const Field fast = choquard_field(u, b, c.params), slow = choquard_field_oracle(u, b, c.params);
      for (std::size_t i = 0; i < g.size(); ++i) CHECK(rel_err(fast[i], slow[i]) < 1e-10);
    }
  }
  CHECK(fields >= 20);
}

TEST_CASE("oracle on a single node field") {
  const GridSpec g{2.0, 8, 3};
  const NonlocalParams np{0.25, 1.0, 2.5};
  const Field b = weight_b_field(g, 2.0);
  const std::size_t i0 = g.flat({3, 4, 6});
  const double c = 1.7;
  Field u(g);
  u[i0] = c;
  const Point x = g.node(i0);
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  const double f0 = b[i0] * std::pow(c, np.p) * std::pow(r, -np.alpha);
  const double hd = g.cell_volume();
  const double want = hd * hd * f0 * f0 * cell_averaged_kernel(3, g.h(), np.mu);
  CHECK(nonlocal_energy_oracle(u, b, np) == Approx(want).epsilon(1e-13));
  CHECK(nonlocal_energy(u, b, np) == Approx(want).epsilon(1e-10));
}

TEST_CASE("algebraic properties of B, D and the Choquard field") {
  const GridSpec g{3.0, 12, 3};
  const NonlocalParams np{0.25, 1.0, 2.5};
  const SteinWeissTerm term(weight_b_field(g, 2.0), np);
  std::mt19937_64 rng(23);
  CHECK(term.energy(Field(g)) == 0.0);
  for (int r = 0; r < 5; ++r) {
    const Field u = random_field(g, rng);
    const double bu = term.energy(u);
    CHECK(bu > 0.0);
    CHECK(term.energy(u.abs()) == Approx(bu).epsilon(1e-14));
    CHECK(term.energy(-u) == Approx(bu).epsilon(1e-14));
    CHECK(term.energy(2.0 * u) == Approx(32.0 * bu).epsilon(1e-12));
    for (double t : {0.5, 2.0, 10.0})
      CHECK(rel_err(term.energy(t * u), std::pow(t, 2.0 * np.p) * bu) < 1e-12);
    CHECK(term.pairing(u, u) == Approx(bu).epsilon(1e-12));
    CHECK(term.pairing(u, Field(g)) == 0.0);
    const Field phi = term.choquard_field(u);
    for (double v : phi.values()) CHECK(v >= 0.0);
    const Field phi_abs = term.choquard_field(u.abs());
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(phi_abs[i] == Approx(phi[i]).epsilon(1e-13));
    const auto ev = term.evaluate(u);
    CHECK(ev.energy == Approx(bu).epsilon(1e-13));
    CHECK(integrate_product(ev.choquard, weighted_density(u, term.b(), np.alpha, np.p).times(radial_weight(g, -np.alpha))) ==
          Approx(bu).epsilon(1e-10));
  }
  const Field zero_phi = term.choquard_field(Field(g));
  for (double v : zero_phi.values()) CHECK(v == 0.0);
  // p-2 < 0 would make b|u|^{p-2}u singular at 0; the nonlinearity is defined as 0 there.
  Field z(g, 1.0);
  z[5] = 0.0;
  CHECK(term.nonlinearity(z)[5] == 0.0);
}

TEST_CASE("without weights the Choquard field is the plain Riesz potential") {
  const GridSpec g{3.0, 8, 3};
  const NonlocalParams np{0.0, 1.2, 2.0};
  std::mt19937_64 rng(31);
  const Field u = random_field(g, rng);
  const Field phi = choquard_field(u, Field(g, 1.0), np);
  const Field direct = riesz_convolve(u.times(u), *RieszKernel::get(g, 1.2));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(phi[i] == Approx(direct[i]).epsilon(1e-13));
}

TEST_CASE("B stays bounded under refinement") {
  const NonlocalParams np{0.25, 1.0, 2.5};
  std::vector<double> values;
  for (int m : {8, 16, 32}) {
    const GridSpec g{4.0, m, 3};
    const Field u = Field::from_function(g, [](const Point& x) { return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])); });
    values.push_back(nonlocal_energy(u, weight_b_field(g, 2.0), np));
  }
  CHECK(std::abs(values[2] - values[1]) < std::abs(values[1] - values[0]));
  CHECK(rel_err(values[1], values[2]) < 0.05);
}
