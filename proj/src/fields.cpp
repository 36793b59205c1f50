#include "bihflow/fields.hpp"

#include <algorithm>
#include <cmath>

#include "bihflow/error.hpp"

namespace bihflow::fields {

void Grid::validate() const {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "grid dimension must be 1, 2 or 3");
  require(box_length > 0.0, ErrorCode::InvalidArgument, "box length must be positive");
  const int m = points_per_axis;
  require(m >= 16 && (m & (m - 1)) == 0, ErrorCode::InvalidArgument,
          "points per axis must be a power of two >= 16");
}

std::size_t Grid::point_count() const noexcept {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(points_per_axis);
  return n;
}

double Grid::cell_volume() const noexcept { return std::pow(spacing(), dim); }

double Grid::volume() const noexcept { return std::pow(box_length, dim); }

std::array<int, 3> Grid::indices(std::size_t p) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  const auto m = static_cast<std::size_t>(points_per_axis);
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(p % m);
    p /= m;
  }
  return idx;
}

std::size_t Grid::flat(const std::array<int, 3>& idx) const noexcept {
  std::size_t p = 0;
  const int m = points_per_axis;
  for (int a = 0; a < dim; ++a) {
    const int i = ((idx[a] % m) + m) % m;
    p = p * static_cast<std::size_t>(m) + static_cast<std::size_t>(i);
  }
  return p;
}

double Grid::coordinate(std::size_t p, int axis) const noexcept {
  return indices(p)[axis] * spacing();
}

int Grid::frequency(int i) const noexcept {
  return i < points_per_axis / 2 ? i : i - points_per_axis;
}

GridField::GridField(const Grid& grid, int codomain_dim)
    : grid_(grid), codomain_(codomain_dim),
      values_(grid.point_count() * static_cast<std::size_t>(codomain_dim), 0.0) {
  grid.validate();
  require(codomain_dim >= 1, ErrorCode::InvalidArgument, "codomain dimension must be >= 1");
}

GridField::GridField(const Grid& grid, int codomain_dim, std::vector<double> values)
    : grid_(grid), codomain_(codomain_dim), values_(std::move(values)) {
  grid.validate();
  require(codomain_dim >= 1, ErrorCode::InvalidArgument, "codomain dimension must be >= 1");
  require(values_.size() == grid.point_count() * static_cast<std::size_t>(codomain_dim),
          ErrorCode::InvalidArgument, "value array does not match grid and codomain");
}

std::span<double> GridField::component(int c) {
  return {values_.data() + c * point_count(), point_count()};
}

std::span<const double> GridField::component(int c) const {
  return {values_.data() + c * point_count(), point_count()};
}

void GridField::gather(std::size_t p, std::span<double> out) const {
  const auto n = point_count();
  for (int c = 0; c < codomain_; ++c) out[c] = values_[c * n + p];
}

void GridField::scatter(std::size_t p, std::span<const double> in) {
  const auto n = point_count();
  for (int c = 0; c < codomain_; ++c) values_[c * n + p] = in[c];
}

std::vector<double> GridField::pointwise_norm() const {
  const auto n = point_count();
  std::vector<double> out(n, 0.0);
  for (int c = 0; c < codomain_; ++c)
    for (std::size_t p = 0; p < n; ++p) out[p] += values_[c * n + p] * values_[c * n + p];
  for (auto& v : out) v = std::sqrt(v);
  return out;
}

double GridField::sup_norm() const {
  const auto norms = pointwise_norm();
  return norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
}

bool GridField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

GridField& GridField::operator+=(const GridField& other) {
  require(other.values_.size() == values_.size(), ErrorCode::InvalidArgument, "field shape mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& other) {
  require(other.values_.size() == values_.size(), ErrorCode::InvalidArgument, "field shape mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

GridField& GridField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

GridField operator+(GridField a, const GridField& b) { return a += b; }
GridField operator-(GridField a, const GridField& b) { return a -= b; }
GridField operator*(double s, GridField a) { return a *= s; }

SpaceTimeField::SpaceTimeField(std::vector<double> times, std::vector<GridField> frames)
    : times_(std::move(times)), frames_(std::move(frames)) {
  validate();
}

void SpaceTimeField::validate() const {
  require(!frames_.empty() && frames_.size() == times_.size(), ErrorCode::InvalidArgument,
          "space-time field needs one frame per time");
  require(times_.front() == 0.0, ErrorCode::InvalidTime, "first frame time must be 0");
  for (std::size_t m = 1; m < times_.size(); ++m)
    require(times_[m] > times_[m - 1], ErrorCode::InvalidTime, "frame times must increase strictly");
  for (const auto& f : frames_) {
    require(f.grid() == frames_.front().grid() && f.codomain_dim() == frames_.front().codomain_dim(),
            ErrorCode::InvalidArgument, "frames must share grid and codomain");
  }
}

std::size_t SpaceTimeField::index_of(double t) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  auto close = [&](double s) { return std::abs(s - t) <= 1e-12 * std::max(1.0, std::abs(t)); };
  if (it != times_.end() && close(*it)) return static_cast<std::size_t>(it - times_.begin());
  if (it != times_.begin() && close(*(it - 1))) return static_cast<std::size_t>(it - times_.begin() - 1);
  fail(ErrorCode::TimeMisaligned, "time " + std::to_string(t) + " is not on the frame grid");
}

double SpaceTimeField::sup_distance(const SpaceTimeField& other) const {
  require(other.size() == size(), ErrorCode::InvalidArgument, "frame count mismatch");
  double d = 0.0;
  for (std::size_t m = 0; m < size(); ++m) d = std::max(d, (frames_[m] - other.frames_[m]).sup_norm());
  return d;
}

std::vector<double> power_time_grid(double T, int frames, double exponent) {
  require(T > 0.0, ErrorCode::InvalidTime, "final time must be positive");
  require(frames >= 2, ErrorCode::InvalidArgument, "need at least two frames");
  require(exponent >= 1.0, ErrorCode::InvalidArgument, "time-grid exponent must be >= 1");
  std::vector<double> t(static_cast<std::size_t>(frames));
  const int last = frames - 1;
  for (int m = 0; m <= last; ++m) t[m] = T * std::pow(static_cast<double>(m) / last, exponent);
  t.back() = T;
  return t;
}

}  // namespace bihflow::fields
