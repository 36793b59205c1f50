#include "bihflow/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include <fftw3.h>

#include "bihflow/error.hpp"

namespace bihflow::spectral {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Plans are created once per (shape, direction) with FFTW_UNALIGNED so they
// can be executed on any buffer through the new-array interface.
fftw_plan plan_for(const Grid& grid, bool inverse_direction) {
  static std::map<std::tuple<int, int, bool>, fftw_plan> plans;
  std::lock_guard lock(planner_mutex());
  const auto key = std::make_tuple(grid.dim, grid.points_per_axis, inverse_direction);
  if (auto it = plans.find(key); it != plans.end()) return it->second;
  int n[3] = {grid.points_per_axis, grid.points_per_axis, grid.points_per_axis};
  const auto count = grid.point_count();
  auto* buf = fftw_alloc_complex(count);
  fftw_plan plan = fftw_plan_dft(grid.dim, n, buf, buf, inverse_direction ? FFTW_BACKWARD : FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  require(plan != nullptr, ErrorCode::InvalidArgument, "FFTW could not create a plan");
  plans.emplace(key, plan);
  return plan;
}

double minimal_image_distance2(const Grid& grid, const std::array<int, 3>& idx) {
  const double h = grid.spacing();
  double d2 = 0.0;
  for (int a = 0; a < grid.dim; ++a) {
    const double d = grid.frequency(idx[a]) * h;
    d2 += d * d;
  }
  return d2;
}

bool inside(double d2, double radius) { return d2 <= radius * radius * (1.0 + 1e-12); }

}  // namespace

std::shared_ptr<const ModeTable> mode_table(const Grid& grid) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, double>, std::shared_ptr<const ModeTable>> cache;
  const auto key = std::make_tuple(grid.dim, grid.points_per_axis, grid.box_length);
  std::lock_guard lock(mutex);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  auto t = std::make_shared<ModeTable>();
  const auto n = grid.point_count();
  t->k.resize(n);
  t->nyquist.resize(n);
  t->symbol.resize(n);
  const double base = 2.0 * std::numbers::pi / grid.box_length;
  for (std::size_t p = 0; p < n; ++p) {
    const auto idx = grid.indices(p);
    double k2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      if (a < grid.dim) {
        t->k[p][a] = base * grid.frequency(idx[a]);
        t->nyquist[p][a] = idx[a] == grid.points_per_axis / 2;
      } else {
        t->k[p][a] = 0.0;
        t->nyquist[p][a] = false;
      }
      k2 += t->k[p][a] * t->k[p][a];
    }
    t->symbol[p] = k2 * k2;
  }
  return cache.emplace(key, std::move(t)).first->second;
}

Spectrum::Spectrum(const Grid& grid, int components)
    : grid_(grid), components_(components),
      coeffs_(grid.point_count() * static_cast<std::size_t>(components)) {}

void transform(const Grid& grid, Complex* data, bool inverse_direction) {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(plan_for(grid, inverse_direction), p, p);
}

Spectrum forward(const GridField& f) {
  Spectrum s(f.grid(), f.codomain_dim());
  const auto n = f.point_count();
  for (int c = 0; c < f.codomain_dim(); ++c) {
    Complex* dst = s.component(c);
    const auto src = f.component(c);
    for (std::size_t p = 0; p < n; ++p) dst[p] = Complex(src[p], 0.0);
    transform(f.grid(), dst, false);
  }
  return s;
}

GridField inverse(const Spectrum& s) {
  GridField f(s.grid(), s.components());
  const auto n = s.mode_count();
  std::vector<Complex> work(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (int c = 0; c < s.components(); ++c) {
    std::copy(s.component(c), s.component(c) + n, work.begin());
    transform(s.grid(), work.data(), true);
    auto dst = f.component(c);
    for (std::size_t p = 0; p < n; ++p) dst[p] = work[p].real() * scale;
  }
  return f;
}

Complex derivative_symbol(const ModeTable& modes, std::size_t p, const MultiIndex& order) {
  Complex m(1.0, 0.0);
  for (int a = 0; a < 3; ++a) {
    if (order[a] == 0) continue;
    if ((order[a] % 2 == 1) && modes.nyquist[p][a]) return Complex(0.0, 0.0);
    const Complex ik(0.0, modes.k[p][a]);
    for (int r = 0; r < order[a]; ++r) m *= ik;
  }
  return m;
}

Spectrum derivative(const Spectrum& s, const MultiIndex& order) {
  const auto modes = mode_table(s.grid());
  Spectrum out(s.grid(), s.components());
  const auto n = s.mode_count();
  for (std::size_t p = 0; p < n; ++p) {
    const Complex m = derivative_symbol(*modes, p, order);
    for (int c = 0; c < s.components(); ++c) out.component(c)[p] = m * s.component(c)[p];
  }
  return out;
}

GridField spectral_derivative(const GridField& f, const MultiIndex& order) {
  for (int a = 0; a < 3; ++a)
    require(order[a] >= 0 && (a < f.grid().dim || order[a] == 0), ErrorCode::UnsupportedOrder,
            "derivative order does not fit the grid dimension");
  require(kernel::order_of(order) <= kernel::kMaxOrder, ErrorCode::UnsupportedOrder,
          "spectral derivatives are limited to order 4");
  return inverse(derivative(forward(f), order));
}

GridField spectral_divergence(const std::vector<GridField>& per_axis) {
  require(!per_axis.empty(), ErrorCode::InvalidArgument, "divergence needs one field per axis");
  const Grid& grid = per_axis.front().grid();
  require(static_cast<int>(per_axis.size()) == grid.dim, ErrorCode::InvalidArgument,
          "divergence needs one field per axis");
  Spectrum total(grid, per_axis.front().codomain_dim());
  for (int a = 0; a < grid.dim; ++a) {
    MultiIndex e{0, 0, 0};
    e[a] = 1;
    const auto d = derivative(forward(per_axis[a]), e);
    for (std::size_t i = 0; i < total.coefficients().size(); ++i)
      total.coefficients()[i] += d.coefficients()[i];
  }
  return inverse(total);
}

std::vector<std::array<int, 3>> ball_offsets(const Grid& grid, double radius) {
  std::vector<std::array<int, 3>> out;
  const auto n = grid.point_count();
  for (std::size_t p = 0; p < n; ++p) {
    const auto idx = grid.indices(p);
    if (!inside(minimal_image_distance2(grid, idx), radius)) continue;
    std::array<int, 3> off{0, 0, 0};
    for (int a = 0; a < grid.dim; ++a) off[a] = grid.frequency(idx[a]);
    out.push_back(off);
  }
  return out;
}

std::size_t ball_count(const Grid& grid, double radius) { return ball_offsets(grid, radius).size(); }

namespace {

std::shared_ptr<const std::vector<Complex>> ball_spectrum(const Grid& grid, double radius) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, double, double>, std::shared_ptr<const std::vector<Complex>>>
      cache;
  const auto key = std::make_tuple(grid.dim, grid.points_per_axis, grid.box_length, radius);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const auto n = grid.point_count();
  auto chi = std::make_shared<std::vector<Complex>>(n);
  for (std::size_t p = 0; p < n; ++p)
    (*chi)[p] = inside(minimal_image_distance2(grid, grid.indices(p)), radius) ? 1.0 : 0.0;
  transform(grid, chi->data(), false);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(chi)).first->second;
}

}  // namespace

std::vector<double> ball_sum(const Grid& grid, const std::vector<double>& density, double radius) {
  const auto n = grid.point_count();
  require(density.size() == n, ErrorCode::InvalidArgument, "density size does not match grid");
  const auto chi = ball_spectrum(grid, radius);
  std::vector<Complex> work(n);
  for (std::size_t p = 0; p < n; ++p) work[p] = Complex(density[p], 0.0);
  transform(grid, work.data(), false);
  for (std::size_t p = 0; p < n; ++p) work[p] *= (*chi)[p];
  transform(grid, work.data(), true);
  std::vector<double> out(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t p = 0; p < n; ++p) out[p] = work[p].real() * scale;
  return out;
}

}  // namespace bihflow::spectral
