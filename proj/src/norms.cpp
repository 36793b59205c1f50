#include "bihflow/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bihflow/error.hpp"
#include "bihflow/parallel.hpp"
#include "bihflow/spectral.hpp"

namespace bihflow::norms {

namespace {

using spectral::Complex;

struct ArgMax {
  double value = -1.0;
  std::size_t index = 0;
};

ArgMax max_of(const std::vector<double>& v) {
  ArgMax a;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] > a.value) a = {v[i], i};
  return a;
}

bool positive_time(double t, double T) { return t > 0.0 && t <= T * (1.0 + 1e-12); }

std::vector<double> coordinates(const Grid& grid, std::size_t p) {
  std::vector<double> x(static_cast<std::size_t>(grid.dim));
  for (int a = 0; a < grid.dim; ++a) x[a] = grid.coordinate(p, a);
  return x;
}

// Pointwise |∇u|^2 and |∇^2 u|^2 (full tensors, Euclidean on the codomain).
struct FrameDerivatives {
  std::vector<double> grad2;
  std::vector<double> hess2;
};

FrameDerivatives frame_derivatives(const GridField& u) {
  const Grid& g = u.grid();
  const auto n = u.point_count();
  FrameDerivatives d{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  const auto s = spectral::forward(u);
  for (int a = 0; a < g.dim; ++a) {
    kernel::MultiIndex e{0, 0, 0};
    e[a] = 1;
    const auto da = spectral::inverse(spectral::derivative(s, e));
    for (int c = 0; c < u.codomain_dim(); ++c) {
      const auto comp = da.component(c);
      for (std::size_t p = 0; p < n; ++p) d.grad2[p] += comp[p] * comp[p];
    }
    for (int b = a; b < g.dim; ++b) {
      kernel::MultiIndex ab{0, 0, 0};
      ab[a] += 1;
      ab[b] += 1;
      const double mult = (a == b) ? 1.0 : 2.0;
      const auto dab = spectral::inverse(spectral::derivative(s, ab));
      for (int c = 0; c < u.codomain_dim(); ++c) {
        const auto comp = dab.component(c);
        for (std::size_t p = 0; p < n; ++p) d.hess2[p] += mult * comp[p] * comp[p];
      }
    }
  }
  return d;
}

double sup_sqrt(const std::vector<double>& v) {
  return std::sqrt(std::max(0.0, *std::max_element(v.begin(), v.end())));
}

void fill_argmax(NormReport& r, const std::string& term, double t, double radius, const Grid& grid,
                 std::size_t p) {
  r.argmax_term = term;
  r.argmax_time = t;
  r.argmax_radius = radius;
  r.argmax_point = coordinates(grid, p);
}

}  // namespace

std::vector<double> dyadic_radii(const Grid& grid, double R) {
  const double h = grid.spacing();
  require(R <= 0.5 * grid.box_length * (1.0 + 1e-12), ErrorCode::InvalidArgument,
          "scan radius exceeds half the box length");
  if (!(R > 2.0 * h * (1.0 + 1e-12)))
    fail(ErrorCode::ScaleUnresolvable, "radius " + std::to_string(R) + " is not above two grid spacings");
  std::vector<double> radii{R};
  while (radii.back() * 0.5 >= 2.0 * h * (1.0 - 1e-12)) radii.push_back(radii.back() * 0.5);
  return radii;
}

ScaleScan bmo_scan(const GridField& f, const std::vector<double>& radii) {
  const Grid& grid = f.grid();
  const auto n = f.point_count();
  const int l = f.codomain_dim();
  const double cell = grid.cell_volume();
  ScaleScan scan;
  for (double r : radii) {
    const auto offsets = spectral::ball_offsets(grid, r);
    const double norm = cell / std::pow(r, grid.dim);
    std::vector<double> osc(n, 0.0);
    parallel_for(n, [&](std::size_t p) {
      const auto center = grid.indices(p);
      std::vector<std::size_t> pts(offsets.size());
      for (std::size_t q = 0; q < offsets.size(); ++q) {
        std::array<int, 3> idx{};
        for (int a = 0; a < grid.dim; ++a) idx[a] = center[a] + offsets[q][a];
        pts[q] = grid.flat(idx);
      }
      std::vector<double> mean(static_cast<std::size_t>(l), 0.0);
      for (int c = 0; c < l; ++c) {
        const auto comp = f.component(c);
        double s = 0.0;
        for (auto q : pts) s += comp[q];
        mean[c] = s / static_cast<double>(pts.size());
      }
      double total = 0.0;
      for (auto q : pts) {
        double d2 = 0.0;
        for (int c = 0; c < l; ++c) {
          const double d = f(q, c) - mean[c];
          d2 += d * d;
        }
        total += std::sqrt(d2);
      }
      osc[p] = total * norm;
    });
    const auto m = max_of(osc);
    scan.per_scale.emplace_back(r, m.value);
    if (m.value > scan.value) {
      scan.value = m.value;
      scan.argmax_point = m.index;
      scan.argmax_radius = r;
    }
  }
  return scan;
}

double bmo_seminorm(const GridField& f, double R) {
  return bmo_scan(f, dyadic_radii(f.grid(), R)).value;
}

double bmo_bruteforce(const GridField& f, double R) {
  const Grid& grid = f.grid();
  dyadic_radii(grid, R);  // same preconditions
  std::vector<double> radii;
  const double h = grid.spacing();
  for (int k = 1; k * h <= R * (1.0 + 1e-12); ++k) radii.push_back(k * h);
  return bmo_scan(f, radii).value;
}

ScaleScan carleson_scan(const GridField& f, const kernel::KernelProfile& profile, int order, double R,
                        const CarlesonOptions& options) {
  const Grid& grid = f.grid();
  require(profile.dim == grid.dim, ErrorCode::InvalidArgument, "kernel profile dimension does not match grid");
  if (order < 1 || order > 2) fail(ErrorCode::UnsupportedOrder, "Carleson functional needs order 1 or 2");
  require(options.nodes_per_octave >= 1, ErrorCode::InvalidArgument, "nodes_per_octave must be >= 1");
  const auto radii = dyadic_radii(grid, R);
  const auto modes = spectral::mode_table(grid);
  const auto n = f.point_count();
  const int l = f.codomain_dim();
  const double k_max = std::numbers::pi / grid.spacing() * std::sqrt(static_cast<double>(grid.dim));
  const double t_min = options.small_scale / k_max;
  const int npo = options.nodes_per_octave;
  const int last = static_cast<int>(std::ceil(std::log2(R / t_min) * npo));
  const double dlog = std::log(2.0) / npo;

  std::vector<kernel::MultiIndex> tensor;
  std::vector<double> mult;
  for (const auto& a : kernel::multi_indices(grid.dim, order)) {
    tensor.push_back(a);
    mult.push_back(kernel::multiplicity(a));
  }
  const auto fhat = spectral::forward(f);

  // integrals[r][x] accumulated over t nodes j with t_j <= r
  std::vector<std::vector<double>> integrals(radii.size(), std::vector<double>(n, 0.0));
  std::vector<Complex> work(n);
  for (int j = 0; j <= last; ++j) {
    const double t = R * std::exp2(-static_cast<double>(j) / npo);
    const double t4 = t * t * t * t;
    const double ti = order == 1 ? t : t * t;
    std::vector<double> density(n, 0.0);
    for (std::size_t a = 0; a < tensor.size(); ++a) {
      for (int c = 0; c < l; ++c) {
        const Complex* src = fhat.component(c);
        for (std::size_t p = 0; p < n; ++p)
          work[p] = ti * spectral::derivative_symbol(*modes, p, tensor[a]) *
                    std::exp(-t4 * modes->symbol[p]) * src[p];
        spectral::transform(grid, work.data(), true);
        const double scale = 1.0 / static_cast<double>(n);
        for (std::size_t p = 0; p < n; ++p) {
          const double v = work[p].real() * scale;
          density[p] += mult[a] * v * v;
        }
      }
    }
    for (std::size_t q = 0; q < radii.size(); ++q) {
      const int first = static_cast<int>(std::lround(std::log2(R / radii[q]) * npo));
      if (j < first) continue;
      const double w = (j == first || j == last) ? 0.5 * dlog : dlog;
      const auto sums = spectral::ball_sum(grid, density, radii[q]);
      for (std::size_t p = 0; p < n; ++p) integrals[q][p] += w * sums[p];
    }
  }

  ScaleScan scan;
  const double cell = grid.cell_volume();
  for (std::size_t q = 0; q < radii.size(); ++q) {
    const double norm = cell / std::pow(radii[q], grid.dim);
    for (auto& v : integrals[q]) v = std::max(0.0, v * norm);
    const auto m = max_of(integrals[q]);
    scan.per_scale.emplace_back(radii[q], m.value);
    if (m.value > scan.value) {
      scan.value = m.value;
      scan.argmax_point = m.index;
      scan.argmax_radius = radii[q];
    }
  }
  return scan;
}

double carleson_functional(const GridField& f, const kernel::KernelProfile& profile, int order, double R,
                           const CarlesonOptions& options) {
  return carleson_scan(f, profile, order, R, options).value;
}

std::vector<std::vector<std::vector<double>>> cylinder_integrals(
    const Grid& grid, const std::vector<double>& times, const std::vector<double>& radii, int terms,
    const std::function<std::vector<std::vector<double>>(std::size_t)>& densities) {
  const auto n = grid.point_count();
  const std::size_t frames = times.size();
  // weights[q][m]: trapezoid weight of frame m for \int_0^{r_q^4}
  std::vector<std::vector<double>> weights(radii.size(), std::vector<double>(frames, 0.0));
  for (std::size_t q = 0; q < radii.size(); ++q) {
    const double tau = std::pow(radii[q], 4);
    for (std::size_t m = 0; m + 1 < frames && times[m] < tau; ++m) {
      const double dt = times[m + 1] - times[m];
      if (times[m + 1] <= tau * (1.0 + 1e-12)) {
        weights[q][m] += 0.5 * dt;
        weights[q][m + 1] += 0.5 * dt;
      } else {
        const double d = tau - times[m];
        const double theta = d / dt;
        weights[q][m] += 0.5 * d * (2.0 - theta);
        weights[q][m + 1] += 0.5 * d * theta;
      }
    }
  }
  const double cell = grid.cell_volume();
  std::vector<std::vector<std::vector<double>>> out(
      radii.size(), std::vector<std::vector<double>>(static_cast<std::size_t>(terms), std::vector<double>(n, 0.0)));
  for (std::size_t m = 0; m < frames; ++m) {
    bool needed = false;
    for (std::size_t q = 0; q < radii.size(); ++q) needed = needed || weights[q][m] != 0.0;
    if (!needed) continue;
    const auto dens = densities(m);
    require(static_cast<int>(dens.size()) == terms, ErrorCode::InvalidArgument, "density term count mismatch");
    for (std::size_t q = 0; q < radii.size(); ++q) {
      const double w = weights[q][m];
      if (w == 0.0) continue;
      for (int k = 0; k < terms; ++k) {
        const auto sums = spectral::ball_sum(grid, dens[k], radii[q]);
        auto& dst = out[q][k];
        for (std::size_t p = 0; p < n; ++p) dst[p] += w * cell * sums[p];
      }
    }
  }
  for (auto& per_r : out)
    for (auto& per_term : per_r)
      for (auto& v : per_term) v = std::max(0.0, v);
  return out;
}

std::vector<double> cylinder_radii(const Grid& grid, const std::vector<double>& times, double T,
                                   const NormOptions& options) {
  require(T > 0.0, ErrorCode::InvalidTime, "norm horizon T must be positive");
  require(times.back() >= T * (1.0 - 1e-12), ErrorCode::InvalidTime, "frames do not reach T");
  require(options.scales >= 1, ErrorCode::InvalidArgument, "need at least one cylinder scale");
  const double h = grid.spacing();
  const double r_max = std::min(std::pow(T, 0.25), 0.5 * grid.box_length);
  std::vector<double> radii;
  for (int j = 0; j < options.scales; ++j) {
    const double r = r_max * std::exp2(-j);
    if (r < 2.0 * h * (1.0 - 1e-12)) break;
    radii.push_back(r);
  }
  if (radii.empty()) fail(ErrorCode::ScaleUnresolvable, "largest cylinder radius is below two grid spacings");
  const double tau = std::pow(radii.back(), 4);
  const auto resolved = std::count_if(times.begin(), times.end(),
                                      [&](double t) { return t > 0.0 && t <= tau * (1.0 + 1e-12); });
  if (resolved < 2)
    fail(ErrorCode::ScaleUnresolvable, "fewer than two frames inside the smallest cylinder [0, r^4]");
  return radii;
}

NormReport x_norm(const SpaceTimeField& u, double T, const NormOptions& options) {
  const Grid& grid = u.grid();
  const auto& times = u.times();
  const auto radii = cylinder_radii(grid, times, T, options);
  NormReport r;
  r.norm = "X";
  std::vector<FrameDerivatives> derivs(u.size());
  for (std::size_t m = 0; m < u.size(); ++m)
    if (times[m] <= T * (1.0 + 1e-12)) derivs[m] = frame_derivatives(u.frame(m));

  double weighted = 0.0, weighted_t = 0.0;
  std::size_t weighted_p = 0;
  for (std::size_t m = 0; m < u.size(); ++m) {
    if (!positive_time(times[m], T)) continue;
    r.sup_part = std::max(r.sup_part, u.frame(m).sup_norm());
    const double t = times[m];
    const auto g = max_of(derivs[m].grad2);
    const double w = std::pow(t, 0.25) * std::sqrt(g.value) + std::sqrt(t) * sup_sqrt(derivs[m].hess2);
    if (w > weighted) {
      weighted = w;
      weighted_t = t;
      weighted_p = g.index;
    }
  }

  const auto cyl = cylinder_integrals(grid, times, radii, 2, [&](std::size_t m) {
    std::vector<std::vector<double>> d(2);
    d[0] = derivs[m].grad2;
    for (auto& v : d[0]) v = v * v;
    d[1] = derivs[m].hess2;
    return d;
  });
  double morrey4 = 0.0, morrey2 = 0.0;
  ArgMax arg4, arg2;
  double r4 = radii.front(), r2 = radii.front();
  r.scale_columns = {"morrey_grad4", "morrey_hess2"};
  for (std::size_t q = 0; q < radii.size(); ++q) {
    const double norm = 1.0 / std::pow(radii[q], grid.dim);
    const auto a4 = max_of(cyl[q][0]);
    const auto a2 = max_of(cyl[q][1]);
    const double v4 = std::pow(norm * a4.value, 0.25);
    const double v2 = std::sqrt(norm * a2.value);
    r.per_scale.push_back({radii[q], {v4, v2}});
    if (v4 > morrey4) morrey4 = v4, arg4 = a4, r4 = radii[q];
    if (v2 > morrey2) morrey2 = v2, arg2 = a2, r2 = radii[q];
  }
  r.terms = {{"sup", r.sup_part}, {"weighted_sup", weighted}, {"morrey_grad4", morrey4},
             {"morrey_hess2", morrey2}};
  r.seminorm_part = weighted + morrey4 + morrey2;
  r.total = r.sup_part + r.seminorm_part;
  if (weighted >= morrey4 && weighted >= morrey2)
    fill_argmax(r, "weighted_sup", weighted_t, 0.0, grid, weighted_p);
  else if (morrey4 >= morrey2)
    fill_argmax(r, "morrey_grad4", std::pow(r4, 4), r4, grid, arg4.index);
  else
    fill_argmax(r, "morrey_hess2", std::pow(r2, 4), r2, grid, arg2.index);
  return r;
}

namespace {

NormReport y_norm(const SpaceTimeField& f, double T, const NormOptions& options, double time_power,
                  double integrand_power, const std::string& name) {
  const Grid& grid = f.grid();
  const auto& times = f.times();
  const auto radii = cylinder_radii(grid, times, T, options);
  NormReport r;
  r.norm = name;
  double sup_t = 0.0;
  std::size_t sup_p = 0;
  for (std::size_t m = 0; m < f.size(); ++m) {
    if (!positive_time(times[m], T)) continue;
    const auto a = max_of(f.frame(m).pointwise_norm());
    const double v = std::pow(times[m], time_power) * a.value;
    if (v > r.sup_part) {
      r.sup_part = v;
      sup_t = times[m];
      sup_p = a.index;
    }
  }
  const auto cyl = cylinder_integrals(grid, times, radii, 1, [&](std::size_t m) {
    auto d = f.frame(m).pointwise_norm();
    if (integrand_power != 1.0)
      for (auto& v : d) v = std::pow(v, integrand_power);
    return std::vector<std::vector<double>>{std::move(d)};
  });
  ArgMax best;
  double best_r = radii.front();
  r.scale_columns = {"cylinder"};
  for (std::size_t q = 0; q < radii.size(); ++q) {
    const double norm = 1.0 / std::pow(radii[q], grid.dim);
    const auto a = max_of(cyl[q][0]);
    const double v = std::pow(norm * a.value, 1.0 / integrand_power);
    r.per_scale.push_back({radii[q], {v}});
    if (v > r.seminorm_part) {
      r.seminorm_part = v;
      best = a;
      best_r = radii[q];
    }
  }
  r.terms = {{"weighted_sup", r.sup_part}, {"cylinder", r.seminorm_part}};
  r.total = r.sup_part + r.seminorm_part;
  if (r.sup_part >= r.seminorm_part)
    fill_argmax(r, "weighted_sup", sup_t, 0.0, grid, sup_p);
  else
    fill_argmax(r, "cylinder", std::pow(best_r, 4), best_r, grid, best.index);
  return r;
}

}  // namespace

NormReport y1_norm(const SpaceTimeField& f, double T, const NormOptions& options) {
  return y_norm(f, T, options, 1.0, 1.0, "Y1");
}

NormReport y2_norm(const SpaceTimeField& f, double T, const NormOptions& options) {
  return y_norm(f, T, options, 0.75, 4.0 / 3.0, "Y2");
}

SpaceTimeField pack_components(const std::vector<SpaceTimeField>& parts) {
  require(!parts.empty(), ErrorCode::InvalidArgument, "nothing to pack");
  const auto& first = parts.front();
  int codomain = 0;
  for (const auto& p : parts) {
    require(p.size() == first.size() && p.grid() == first.grid() && p.times() == first.times(),
            ErrorCode::InvalidArgument, "packed fields must share grid and frame times");
    codomain += p.codomain_dim();
  }
  std::vector<GridField> frames;
  frames.reserve(first.size());
  for (std::size_t m = 0; m < first.size(); ++m) {
    std::vector<double> values;
    values.reserve(first.grid().point_count() * static_cast<std::size_t>(codomain));
    for (const auto& p : parts) {
      const auto& v = p.frame(m).values();
      values.insert(values.end(), v.begin(), v.end());
    }
    frames.emplace_back(first.grid(), codomain, std::move(values));
  }
  return SpaceTimeField(first.times(), std::move(frames));
}

nlohmann::json to_json(const NormReport& r) {
  nlohmann::json j;
  j["norm"] = r.norm;
  j["sup_part"] = r.sup_part;
  j["seminorm_part"] = r.seminorm_part;
  j["total"] = r.total;
  j["terms"] = r.terms;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [radius, values] : r.per_scale) {
    nlohmann::json row{{"r", radius}};
    for (std::size_t c = 0; c < values.size(); ++c) row[r.scale_columns[c]] = values[c];
    rows.push_back(row);
  }
  j["per_scale"] = rows;
  j["argmax"] = {{"term", r.argmax_term}, {"t", r.argmax_time}, {"r", r.argmax_radius}, {"x", r.argmax_point}};
  return j;
}

nlohmann::json to_json(const ScaleScan& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [radius, v] : s.per_scale) rows.push_back({{"r", radius}, {"value", v}});
  return {{"value", s.value}, {"per_scale", rows}, {"argmax_radius", s.argmax_radius},
          {"argmax_point", s.argmax_point}};
}

}  // namespace bihflow::norms
