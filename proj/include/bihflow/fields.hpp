#pragma once

// Sampled maps on a periodic box [0, L)^n, the discrete stand-in for R^n.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace bihflow::fields {

struct Grid {
  int dim = 1;
  double box_length = 1.0;
  int points_per_axis = 16;

  void validate() const;

  double spacing() const noexcept { return box_length / points_per_axis; }
  std::size_t point_count() const noexcept;
  /// h^n, the quadrature weight of one lattice point.
  double cell_volume() const noexcept;
  double volume() const noexcept;

  /// Per-axis lattice indices of flat point p (axis 0 varies slowest).
  std::array<int, 3> indices(std::size_t p) const noexcept;
  std::size_t flat(const std::array<int, 3>& idx) const noexcept;
  /// Physical coordinate of point p along an axis, in [0, L).
  double coordinate(std::size_t p, int axis) const noexcept;

  /// Signed integer frequency of per-axis index i: i for i < M/2, i - M otherwise.
  int frequency(int i) const noexcept;

  bool operator==(const Grid& other) const noexcept = default;
};

/// Values stored component-major: values[c * point_count + p].
class GridField {
 public:
  GridField() = default;
  GridField(const Grid& grid, int codomain_dim);
  GridField(const Grid& grid, int codomain_dim, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  int codomain_dim() const noexcept { return codomain_; }
  std::size_t point_count() const noexcept { return grid_.point_count(); }

  std::span<double> component(int c);
  std::span<const double> component(int c) const;

  double& operator()(std::size_t p, int c) { return values_[c * point_count() + p]; }
  double operator()(std::size_t p, int c) const { return values_[c * point_count() + p]; }

  std::vector<double>& values() noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Ambient vector at point p.
  void gather(std::size_t p, std::span<double> out) const;
  void scatter(std::size_t p, std::span<const double> in);

  /// max_x |f(x)| with the Euclidean norm on the codomain.
  double sup_norm() const;
  /// Pointwise Euclidean norm of the codomain vector.
  std::vector<double> pointwise_norm() const;

  bool all_finite() const;

  GridField& operator+=(const GridField& other);
  GridField& operator-=(const GridField& other);
  GridField& operator*=(double s);

 private:
  Grid grid_;
  int codomain_ = 1;
  std::vector<double> values_;
};

GridField operator+(GridField a, const GridField& b);
GridField operator-(GridField a, const GridField& b);
GridField operator*(double s, GridField a);

/// Samples f(x) -> R^l at every lattice point. f receives the coordinate
/// array (length dim) and writes l values.
template <class F>
GridField sample(const Grid& grid, int codomain_dim, F&& f) {
  GridField out(grid, codomain_dim);
  std::array<double, 3> x{};
  std::vector<double> v(static_cast<std::size_t>(codomain_dim));
  for (std::size_t p = 0; p < grid.point_count(); ++p) {
    for (int a = 0; a < grid.dim; ++a) x[a] = grid.coordinate(p, a);
    f(std::span<const double>(x.data(), grid.dim), std::span<double>(v));
    out.scatter(p, v);
  }
  return out;
}

/// Time-indexed frames, times[0] = 0 strictly increasing.
class SpaceTimeField {
 public:
  SpaceTimeField() = default;
  SpaceTimeField(std::vector<double> times, std::vector<GridField> frames);

  void validate() const;

  const Grid& grid() const { return frames_.front().grid(); }
  int codomain_dim() const { return frames_.front().codomain_dim(); }
  std::size_t size() const noexcept { return frames_.size(); }

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<GridField>& frames() const noexcept { return frames_; }
  std::vector<GridField>& frames() noexcept { return frames_; }
  const GridField& frame(std::size_t m) const { return frames_.at(m); }
  GridField& frame(std::size_t m) { return frames_.at(m); }

  /// Index of a time that must be on the grid (exact match, or within
  /// 1e-12 relative); throws TimeMisaligned otherwise.
  std::size_t index_of(double t) const;

  double final_time() const { return times_.back(); }

  /// max over frames of the pointwise sup difference.
  double sup_distance(const SpaceTimeField& other) const;

 private:
  std::vector<double> times_;
  std::vector<GridField> frames_;
};

/// frames times t_m = T (m / (frames - 1))^exponent, m = 0..frames-1.
std::vector<double> power_time_grid(double T, int frames, double exponent = 4.0);

}  // namespace bihflow::fields
