#include "swnehari/steinweiss.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "fftw_util.hpp"

namespace swnehari {

namespace {

// ∫_{[-1,1]^d} |z|^{-μ} dz.
//
// With I(s) the integral over [-s,s]^d, scaling gives I(1/2) = 2^{μ-d} I(1),
// so I(1) = S / (1 - 2^{μ-d}) where S is the integral over the shell
// [-1,1]^d \ [-1/2,1/2]^d. The shell integrand is smooth, so nested midpoint
// sums with Richardson extrapolation converge quickly.
double unit_cube_kernel_integral(int dim, double mu) {
  const int sub = 1 << dim;  // subcubes of side 1/2 in [0,1]^d
  auto midpoint_sum = [&](int n) {
    const double step = 0.5 / n;
    double total = 0.0;
    for (int c = 1; c < sub; ++c) {  // c == 0 is the inner cube
      std::array<double, 3> lo{0.0, 0.0, 0.0};
      for (int a = 0; a < dim; ++a) lo[a] = ((c >> a) & 1) ? 0.5 : 0.0;
      const long cells = static_cast<long>(std::pow(n, dim));
      double s = 0.0;
      for (long k = 0; k < cells; ++k) {
        long rem = k;
        double r2 = 0.0;
        for (int a = 0; a < dim; ++a) {
          const double x = lo[a] + (static_cast<double>(rem % n) + 0.5) * step;
          rem /= n;
          r2 += x * x;
        }
        s += std::pow(r2, -0.5 * mu);
      }
      total += s * std::pow(step, dim);
    }
    return total * sub;  // reflect [0,1]^d onto all orthants
  };

  const int max_level = dim == 3 ? 7 : 10;
  std::vector<std::vector<double>> table;
  double prev = 0.0;
  for (int level = 0; level <= max_level; ++level) {
    std::vector<double> row{midpoint_sum(1 << level)};
    for (int j = 1; j <= level; ++j) {
      const double f = std::pow(4.0, j);
      row.push_back(row[j - 1] + (row[j - 1] - table[level - 1][j - 1]) / (f - 1.0));
    }
    const double est = row.back();
    table.push_back(std::move(row));
    if (level >= 2 && std::abs(est - prev) <= 1e-8 * std::abs(est)) break;
    prev = est;
  }
  const double shell = table.back().back();
  return shell / (1.0 - std::pow(2.0, mu - dim));
}

}  // namespace

double cell_averaged_kernel(int dim, double h, double mu) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("kernel dimension must be 1, 2 or 3");
  if (!(mu >= 0.0 && mu < dim)) throw std::invalid_argument("kernel exponent must satisfy 0 <= mu < d");
  static std::mutex m;
  static std::map<std::pair<int, double>, double> cache;
  double unit;
  {
    std::lock_guard lock(m);
    auto it = cache.find({dim, mu});
    if (it == cache.end()) it = cache.emplace(std::pair{dim, mu}, unit_cube_kernel_integral(dim, mu)).first;
    unit = it->second;
  }
  return std::pow(0.5 * h, dim - mu) * unit / std::pow(h, dim);
}

struct RieszKernel::Impl {
  int padded = 0;
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
  detail::FftwArray<fftw_complex> transform;
  detail::Plan forward;
  detail::Plan backward;
};

RieszKernel::RieszKernel(const GridSpec& grid, double mu) : grid_(grid), mu_(mu), impl_(std::make_unique<Impl>()) {
  grid_.validate();
  diag_ = cell_averaged_kernel(grid.dim, grid.h(), mu);
  const int m = grid.points_per_axis;
  const int pm = 2 * m;
  const int d = grid.dim;
  impl_->padded = pm;
  impl_->real_size = 1;
  for (int a = 0; a < d; ++a) impl_->real_size *= pm;
  impl_->complex_size = impl_->real_size / pm * (pm / 2 + 1);

  auto real = detail::alloc_real(impl_->real_size);
  impl_->transform = detail::alloc_complex(impl_->complex_size);
  std::array<int, 3> dims{pm, pm, pm};
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    impl_->forward.reset(fftw_plan_dft_r2c(d, dims.data(), real.get(), impl_->transform.get(), FFTW_ESTIMATE));
    impl_->backward.reset(fftw_plan_dft_c2r(d, dims.data(), impl_->transform.get(), real.get(), FFTW_ESTIMATE));
  }
  // Wrap-around layout: padded index j holds offset j (j < M) or j - 2M (j > M).
  for (std::size_t flat = 0; flat < impl_->real_size; ++flat) {
    std::size_t rem = flat;
    std::array<int, 3> off{0, 0, 0};
    bool unused = false;
    for (int a = d - 1; a >= 0; --a) {
      const int j = static_cast<int>(rem % pm);
      rem /= pm;
      if (j == m) unused = true;
      off[a] = j < m ? j : j - pm;
    }
    real[flat] = unused ? 0.0 : at_offset(off);
  }
  fftw_execute_dft_r2c(impl_->forward.get(), real.get(), impl_->transform.get());
}

RieszKernel::~RieszKernel() = default;

std::shared_ptr<const RieszKernel> RieszKernel::get(const GridSpec& grid, double mu) {
  static std::mutex m;
  static std::map<std::tuple<int, int, double, double>, std::shared_ptr<const RieszKernel>> cache;
  const auto key = std::make_tuple(grid.dim, grid.points_per_axis, grid.half_width, mu);
  std::lock_guard lock(m);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto k = std::make_shared<const RieszKernel>(grid, mu);
  cache.emplace(key, k);
  return k;
}

double RieszKernel::at_offset(const std::array<int, 3>& offset) const {
  double r2 = 0.0;
  for (int a = 0; a < grid_.dim; ++a) r2 += static_cast<double>(offset[a]) * offset[a];
  if (r2 == 0.0) return diag_;
  const double h = grid_.h();
  return std::pow(r2 * h * h, -0.5 * mu_);
}

Field RieszKernel::convolve(const Field& f) const {
  if (!(f.grid() == grid_)) throw std::invalid_argument("kernel and field grids differ");
  const int m = grid_.points_per_axis;
  const int pm = impl_->padded;
  const int d = grid_.dim;
  auto real = detail::alloc_real(impl_->real_size);
  auto spec = detail::alloc_complex(impl_->complex_size);
  std::fill(real.get(), real.get() + impl_->real_size, 0.0);

  auto padded_flat = [&](const std::array<int, 3>& idx) {
    std::size_t p = 0;
    for (int a = 0; a < d; ++a) p = p * pm + idx[a];
    return p;
  };
  for (std::size_t i = 0; i < f.size(); ++i) real[padded_flat(grid_.index(i))] = f[i];

  fftw_execute_dft_r2c(impl_->forward.get(), real.get(), spec.get());
  const fftw_complex* kt = impl_->transform.get();
  for (std::size_t k = 0; k < impl_->complex_size; ++k) {
    const double re = spec[k][0] * kt[k][0] - spec[k][1] * kt[k][1];
    const double im = spec[k][0] * kt[k][1] + spec[k][1] * kt[k][0];
    spec[k][0] = re;
    spec[k][1] = im;
  }
  fftw_execute_dft_c2r(impl_->backward.get(), spec.get(), real.get());

  const double scale = grid_.cell_volume() / static_cast<double>(impl_->real_size);
  Field out(grid_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = real[padded_flat(grid_.index(i))] * scale;
  (void)m;
  return out;
}

Field radial_weight(const GridSpec& grid, double alpha) {
  return Field::from_function(grid, [alpha](const Point& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    return std::pow(r2, -0.5 * alpha);
  });
}

namespace {

Field density_with_weight(const Field& u, const Field& b, const Field& weight, double p) {
  require_same_grid(u, b);
  Field f(u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) f[i] = b[i] * std::pow(std::abs(u[i]), p) * weight[i];
  return f;
}

}  // namespace

Field weighted_density(const Field& u, const Field& b, double alpha, double p) {
  return density_with_weight(u, b, radial_weight(u.grid(), alpha), p);
}

Field riesz_convolve(const Field& f, const RieszKernel& kernel) { return kernel.convolve(f); }

SteinWeissTerm::SteinWeissTerm(const Field& b, const NonlocalParams& params)
    : params_(params), b_(b), weight_(radial_weight(b.grid(), params.alpha)), kernel_(RieszKernel::get(b.grid(), params.mu)) {}

Field SteinWeissTerm::density(const Field& u) const { return density_with_weight(u, b_, weight_, params_.p); }

Field SteinWeissTerm::choquard_field(const Field& u) const { return kernel_->convolve(density(u)).times(weight_); }

SteinWeissTerm::Evaluation SteinWeissTerm::evaluate(const Field& u) const {
  const Field f = density(u);
  Field g = kernel_->convolve(f);
  const double e = integrate_product(f, g);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= weight_[i];
  return {e, std::move(g)};
}

double SteinWeissTerm::energy(const Field& u) const {
  const Field f = density(u);
  return integrate_product(f, kernel_->convolve(f));
}

Field SteinWeissTerm::nonlinearity(const Field& u) const {
  require_same_grid(u, b_);
  Field out(u.grid());
  const double e = params_.p - 1.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double v = u[i];
    out[i] = v == 0.0 ? 0.0 : b_[i] * std::copysign(std::pow(std::abs(v), e), v);
  }
  return out;
}

double SteinWeissTerm::pairing(const Field& u, const Field& phi) const {
  return integrate_product(choquard_field(u).times(nonlinearity(u)), phi);
}

Field choquard_field(const Field& u, const Field& b, const NonlocalParams& params) {
  return SteinWeissTerm(b, params).choquard_field(u);
}

double nonlocal_energy(const Field& u, const Field& b, const NonlocalParams& params) {
  return SteinWeissTerm(b, params).energy(u);
}

double nonlocal_pairing(const Field& u, const Field& phi, const Field& b, const NonlocalParams& params) {
  return SteinWeissTerm(b, params).pairing(u, phi);
}

namespace {

void require_oracle_size(const GridSpec& g) {
  if (g.size() > kOracleMaxNodes) {
    throw std::invalid_argument("direct-sum oracle limited to " + std::to_string(kOracleMaxNodes) + " nodes");
  }
}

// Dense K(x_i - x_j) on the grid, built from scratch (no padding, no FFT).
std::vector<double> dense_kernel(const GridSpec& g, double mu) {
  const double diag = cell_averaged_kernel(g.dim, g.h(), mu);
  const std::size_t n = g.size();
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const Point xi = g.node(i);
    for (std::size_t j = 0; j < n; ++j) {
      const Point xj = g.node(j);
      double r2 = 0.0;
      for (int a = 0; a < g.dim; ++a) r2 += (xi[a] - xj[a]) * (xi[a] - xj[a]);
      k[i * n + j] = i == j ? diag : std::pow(r2, -0.5 * mu);
    }
  }
  return k;
}

Field dense_convolve(const Field& f, double mu) {
  const GridSpec& g = f.grid();
  require_oracle_size(g);
  const auto k = dense_kernel(g, mu);
  const std::size_t n = g.size();
  Field out(g);
  for (std::size_t i = 0; i < n; ++i) {
    long double s = 0.0L;
    for (std::size_t j = 0; j < n; ++j) s += static_cast<long double>(k[i * n + j]) * f[j];
    out[i] = static_cast<double>(s) * g.cell_volume();
  }
  return out;
}

}  // namespace

Field riesz_convolve_oracle(const Field& f, const RieszKernel& kernel) { return dense_convolve(f, kernel.mu()); }

double nonlocal_energy_oracle(const Field& u, const Field& b, const NonlocalParams& params) {
  const GridSpec& g = u.grid();
  require_oracle_size(g);
  const Field f = weighted_density(u, b, params.alpha, params.p);
  const auto k = dense_kernel(g, params.mu);
  const std::size_t n = g.size();
  long double s = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s += static_cast<long double>(f[i]) * k[i * n + j] * f[j];
  }
  const double hd = g.cell_volume();
  return static_cast<double>(s) * hd * hd;
}

Field choquard_field_oracle(const Field& u, const Field& b, const NonlocalParams& params) {
  const Field f = weighted_density(u, b, params.alpha, params.p);
  return dense_convolve(f, params.mu).times(radial_weight(u.grid(), params.alpha));
}

double nonlocal_pairing_oracle(const Field& u, const Field& phi, const Field& b, const NonlocalParams& params) {
  const GridSpec& g = u.grid();
  require_oracle_size(g);
  const Field f = weighted_density(u, b, params.alpha, params.p);
  const Field w = radial_weight(g, params.alpha);
  const auto k = dense_kernel(g, params.mu);
  const std::size_t n = g.size();
  long double s = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    if (u[i] == 0.0) continue;
    const double local = b[i] * std::pow(std::abs(u[i]), params.p - 2.0) * u[i] * phi[i] * w[i];
    long double inner = 0.0L;
    for (std::size_t j = 0; j < n; ++j) inner += static_cast<long double>(k[i * n + j]) * f[j];
    s += inner * local;
  }
  const double hd = g.cell_volume();
  return static_cast<double>(s) * hd * hd;
}

}  // namespace swnehari
