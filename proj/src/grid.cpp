#include "swnehari/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <stdexcept>

#include "fftw_util.hpp"

namespace swnehari {

namespace {

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

std::size_t axis_stride(const GridSpec& g, int axis) {
  return ipow(static_cast<std::size_t>(g.points_per_axis), g.dim - 1 - axis);
}

// Calls fn(base) for the first flat index of every grid line along `axis`.
template <class Fn>
void for_each_line(const GridSpec& g, int axis, Fn&& fn) {
  const std::size_t m = g.points_per_axis;
  const std::size_t stride = axis_stride(g, axis);
  const std::size_t n = g.size();
  const std::size_t block = stride * m;
  for (std::size_t outer = 0; outer < n; outer += block) {
    for (std::size_t inner = 0; inner < stride; ++inner) fn(outer + inner, stride);
  }
}

}  // namespace

void GridSpec::validate() const {
  if (!(half_width > 0.0)) throw std::invalid_argument("box half width must be positive");
  if (points_per_axis < 4 || points_per_axis % 2 != 0) {
    throw std::invalid_argument("points per axis must be even and at least 4");
  }
  if (dim < 1 || dim > 3) throw std::invalid_argument("grid dimension must be 1, 2 or 3");
}

double GridSpec::cell_volume() const { return std::pow(h(), dim); }

std::size_t GridSpec::size() const { return ipow(static_cast<std::size_t>(points_per_axis), dim); }

std::array<int, 3> GridSpec::index(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % points_per_axis);
    flat /= points_per_axis;
  }
  return idx;
}

std::size_t GridSpec::flat(const std::array<int, 3>& idx) const {
  std::size_t f = 0;
  for (int a = 0; a < dim; ++a) f = f * points_per_axis + idx[a];
  return f;
}

Point GridSpec::node(std::size_t flat_index) const {
  const auto idx = index(flat_index);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) x[a] = coord(idx[a]);
  return x;
}

Field::Field(const GridSpec& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

Field::Field(const GridSpec& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw std::invalid_argument("field size does not match grid");
  if (!all_finite()) throw std::invalid_argument("field contains non-finite entries");
}

Field Field::from_function(const GridSpec& grid, const std::function<double(const Point&)>& f) {
  Field out(grid);
  for (std::size_t i = 0; i < out.size(); ++i) out.values_[i] = f(grid.node(i));
  return out;
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::min() const { return *std::min_element(values_.begin(), values_.end()); }

void require_same_grid(const Field& a, const Field& b) {
  if (!(a.grid() == b.grid()) || a.size() != b.size()) throw std::invalid_argument("fields live on different grids");
}

Field& Field::operator+=(const Field& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::axpy(double s, const Field& o) {
  require_same_grid(*this, o);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * o.values_[i];
  return *this;
}

Field Field::abs() const {
  Field out = *this;
  for (double& v : out.values_) v = std::abs(v);
  return out;
}

Field Field::times(const Field& o) const {
  require_same_grid(*this, o);
  Field out = *this;
  for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] *= o.values_[i];
  return out;
}

namespace {

// Neumaier summation: deterministic and far less order-sensitive than a
// naive loop.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

double integrate(const Field& f) {
  CompensatedSum s;
  for (double v : f.values()) s.add(v);
  return f.grid().cell_volume() * s.value();
}

double integrate_product(const Field& f, const Field& g) {
  require_same_grid(f, g);
  CompensatedSum s;
  const auto a = f.values();
  const auto b = g.values();
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return f.grid().cell_volume() * s.value();
}

std::vector<Field> gradient(const Field& f) {
  const GridSpec& g = f.grid();
  const int m = g.points_per_axis;
  const double inv2h = 1.0 / (2.0 * g.h());
  const auto in = f.values();
  std::vector<Field> out;
  out.reserve(g.dim);
  for (int axis = 0; axis < g.dim; ++axis) {
    Field d(g);
    auto o = d.values();
    for_each_line(g, axis, [&](std::size_t base, std::size_t st) {
      auto at = [&](int i) { return in[base + i * st]; };
      o[base] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) * inv2h;
      for (int i = 1; i < m - 1; ++i) o[base + i * st] = (at(i + 1) - at(i - 1)) * inv2h;
      o[base + (m - 1) * st] = (3.0 * at(m - 1) - 4.0 * at(m - 2) + at(m - 3)) * inv2h;
    });
    out.push_back(std::move(d));
  }
  return out;
}

Field gradient_adjoint(const Field& y, int axis) {
  const GridSpec& g = y.grid();
  const int m = g.points_per_axis;
  const double inv2h = 1.0 / (2.0 * g.h());
  const auto in = y.values();
  Field out(g);
  auto o = out.values();
  for_each_line(g, axis, [&](std::size_t base, std::size_t st) {
    auto add = [&](int j, double v) { o[base + j * st] += v; };
    auto yv = [&](int i) { return in[base + i * st] * inv2h; };
    add(0, -3.0 * yv(0));
    add(1, 4.0 * yv(0));
    add(2, -yv(0));
    for (int i = 1; i < m - 1; ++i) {
      add(i + 1, yv(i));
      add(i - 1, -yv(i));
    }
    add(m - 1, 3.0 * yv(m - 1));
    add(m - 2, -4.0 * yv(m - 1));
    add(m - 3, yv(m - 1));
  });
  return out;
}

std::vector<Field> edge_differences(const Field& f) {
  const GridSpec& g = f.grid();
  const int m = g.points_per_axis;
  const double inv_h = 1.0 / g.h();
  const auto in = f.values();
  std::vector<Field> out;
  out.reserve(g.dim);
  for (int axis = 0; axis < g.dim; ++axis) {
    Field d(g);
    auto o = d.values();
    for_each_line(g, axis, [&](std::size_t base, std::size_t st) {
      for (int i = 0; i < m - 1; ++i) o[base + i * st] = (in[base + (i + 1) * st] - in[base + i * st]) * inv_h;
    });
    out.push_back(std::move(d));
  }
  return out;
}

Field stiffness(const Field& u) {
  const GridSpec& g = u.grid();
  const int m = g.points_per_axis;
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const auto in = u.values();
  Field out(g);
  auto o = out.values();
  for (int axis = 0; axis < g.dim; ++axis) {
    for_each_line(g, axis, [&](std::size_t base, std::size_t st) {
      for (int i = 0; i < m - 1; ++i) {
        const double jump = (in[base + (i + 1) * st] - in[base + i * st]) * inv_h2;
        o[base + i * st] -= jump;
        o[base + (i + 1) * st] += jump;
      }
    });
  }
  return out;
}

Field h1v_apply(const Field& u, const Field& potential) {
  Field out = stiffness(u);
  out += u.times(potential);
  return out;
}

double h1v_inner(const Field& u, const Field& w, const Field& potential) {
  require_same_grid(u, w);
  require_same_grid(u, potential);
  const auto du = edge_differences(u);
  const auto dw = edge_differences(w);
  CompensatedSum s;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double v = potential[i] * u[i] * w[i];
    for (int a = 0; a < u.grid().dim; ++a) v += du[a][i] * dw[a][i];
    s.add(v);
  }
  return u.grid().cell_volume() * s.value();
}

double h1v_norm(const Field& u, const Field& potential) { return std::sqrt(h1v_inner(u, u, potential)); }

struct H1Preconditioner::Impl {
  detail::Plan forward;
  detail::Plan backward;
  detail::FftwArray<double> buf;
};

H1Preconditioner::H1Preconditioner(const GridSpec& grid, double v0) : grid_(grid), impl_(std::make_unique<Impl>()) {
  grid_.validate();
  if (!(v0 > 0.0)) throw std::invalid_argument("preconditioner shift must be positive");
  const int m = grid.points_per_axis;
  const double h = grid.h();
  std::vector<double> sym1(m);
  for (int k = 0; k < m; ++k) {
    const double s = 2.0 * std::sin(0.5 * std::numbers::pi * k / m) / h;
    sym1[k] = s * s;
  }
  const std::size_t n = grid.size();
  inv_symbol_.resize(n);
  // Cosine transforms are unnormalized: forward then backward scales by (2M)^d.
  const double norm = std::pow(2.0 * m, grid.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = grid.index(i);
    double lam = v0;
    for (int a = 0; a < grid.dim; ++a) lam += sym1[idx[a]];
    inv_symbol_[i] = 1.0 / (lam * norm);
  }
  impl_->buf = detail::alloc_real(n);
  std::array<int, 3> dims{m, m, m};
  std::array<fftw_r2r_kind, 3> fwd{FFTW_REDFT10, FFTW_REDFT10, FFTW_REDFT10};
  std::array<fftw_r2r_kind, 3> bwd{FFTW_REDFT01, FFTW_REDFT01, FFTW_REDFT01};
  std::lock_guard lock(detail::fftw_planner_mutex());
  impl_->forward.reset(fftw_plan_r2r(grid.dim, dims.data(), impl_->buf.get(), impl_->buf.get(), fwd.data(), FFTW_ESTIMATE));
  impl_->backward.reset(fftw_plan_r2r(grid.dim, dims.data(), impl_->buf.get(), impl_->buf.get(), bwd.data(), FFTW_ESTIMATE));
}

H1Preconditioner::~H1Preconditioner() = default;

Field H1Preconditioner::apply(const Field& g) const {
  if (!(g.grid() == grid_)) throw std::invalid_argument("preconditioner grid mismatch");
  const std::size_t n = g.size();
  auto work = detail::alloc_real(n);
  std::copy(g.values().begin(), g.values().end(), work.get());
  fftw_execute_r2r(impl_->forward.get(), work.get(), work.get());
  for (std::size_t i = 0; i < n; ++i) work[i] *= inv_symbol_[i];
  fftw_execute_r2r(impl_->backward.get(), work.get(), work.get());
  Field out(grid_);
  std::copy(work.get(), work.get() + n, out.values().begin());
  return out;
}

namespace {

static_assert(std::endian::native == std::endian::little, "binary field format assumes a little-endian host");

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("truncated field file");
  return v;
}

}  // namespace

void write_field_binary(const Field& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().dim));
  put<double>(os, f.grid().half_width);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid().points_per_axis));
  os.write(reinterpret_cast<const char*>(f.values().data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!os) throw std::runtime_error("failed writing " + path);
}

Field read_field_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  GridSpec g;
  g.dim = static_cast<int>(get<std::uint32_t>(is));
  g.half_width = get<double>(is);
  g.points_per_axis = static_cast<int>(get<std::uint32_t>(is));
  g.validate();
  std::vector<double> v(g.size());
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw std::runtime_error("truncated field file " + path);
  return Field(g, std::move(v));
}

void write_field_csv(const Field& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  const int d = f.grid().dim;
  for (int a = 0; a < d; ++a) os << 'x' << a << ',';
  os << "value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point x = f.grid().node(i);
    for (int a = 0; a < d; ++a) os << x[a] << ',';
    os << f[i] << '\n';
  }
}

}  // namespace swnehari
