#include "bihflow/semigroup.hpp"

#include <cmath>
#include <numbers>

#include "bihflow/error.hpp"
#include "bihflow/parallel.hpp"
#include "bihflow/rng.hpp"

namespace bihflow::semigroup {

namespace {

using spectral::Complex;

std::vector<Spectrum> spectra_of(const SpaceTimeField& f) {
  std::vector<Spectrum> out;
  out.reserve(f.size());
  for (const auto& fr : f.frames()) out.push_back(spectral::forward(fr));
  return out;
}

}  // namespace

double phi1(double z, const DuhamelScheme& scheme) {
  if (std::abs(z) < scheme.phi_threshold) {
    // sum_k (-z)^k / (k+1)!
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 10; ++k) {
      term *= -z / (k + 1);
      sum += term;
    }
    return sum;
  }
  return -std::expm1(-z) / z;
}

double phi2(double z, const DuhamelScheme& scheme) {
  if (std::abs(z) < scheme.phi_threshold) {
    // sum_k (-z)^k / (k+2)!
    double term = 0.5, sum = 0.5;
    for (int k = 1; k < 10; ++k) {
      term *= -z / (k + 2);
      sum += term;
    }
    return sum;
  }
  return (z + std::expm1(-z)) / (z * z);
}

Spectrum apply_G(const Spectrum& u0, double t) {
  require(t >= 0.0, ErrorCode::InvalidTime, "evolution time must be nonnegative");
  Spectrum out = u0;
  if (t == 0.0) return out;
  const auto modes = spectral::mode_table(u0.grid());
  const auto n = u0.mode_count();
  for (std::size_t p = 0; p < n; ++p) {
    const double decay = std::exp(-t * modes->symbol[p]);
    for (int c = 0; c < u0.components(); ++c) out.component(c)[p] *= decay;
  }
  return out;
}

GridField apply_G(const GridField& u0, double t) {
  require(t >= 0.0, ErrorCode::InvalidTime, "evolution time must be nonnegative");
  if (t == 0.0) return u0;
  return spectral::inverse(apply_G(spectral::forward(u0), t));
}

SpaceTimeField free_evolution(const GridField& u0, const std::vector<double>& times) {
  const auto s = spectral::forward(u0);
  std::vector<GridField> frames;
  frames.reserve(times.size());
  for (double t : times) frames.push_back(t == 0.0 ? u0 : spectral::inverse(apply_G(s, t)));
  return SpaceTimeField(times, std::move(frames));
}

std::vector<Spectrum> duhamel_spectra(const std::vector<double>& times, const std::vector<Spectrum>& forcing,
                                      std::size_t last, const DuhamelScheme& scheme) {
  require(!forcing.empty() && forcing.size() == times.size() && last < times.size(), ErrorCode::InvalidArgument,
          "forcing frames do not match the time grid");
  const Grid& grid = forcing.front().grid();
  const int comps = forcing.front().components();
  const auto modes = spectral::mode_table(grid);
  const auto n = forcing.front().mode_count();
  std::vector<Spectrum> out;
  out.reserve(last + 1);
  out.emplace_back(grid, comps);  // S_0 = 0
  for (std::size_t m = 0; m < last; ++m) {
    const double dt = times[m + 1] - times[m];
    Spectrum next(grid, comps);
    const Spectrum& prev = out.back();
    parallel_for(n, [&](std::size_t p) {
      const double z = dt * modes->symbol[p];
      const double e = std::exp(-z);
      const double b = phi2(z, scheme);
      const double a = phi1(z, scheme) - b;
      for (int c = 0; c < comps; ++c) {
        next.component(c)[p] = e * prev.component(c)[p] +
                               dt * (a * forcing[m].component(c)[p] + b * forcing[m + 1].component(c)[p]);
      }
    });
    out.push_back(std::move(next));
  }
  return out;
}

GridField apply_S(const SpaceTimeField& f, double t_target, const DuhamelScheme& scheme) {
  const auto idx = f.index_of(t_target);
  const auto s = duhamel_spectra(f.times(), spectra_of(f), idx, scheme);
  return spectral::inverse(s.back());
}

SpaceTimeField duhamel(const SpaceTimeField& f, const DuhamelScheme& scheme) {
  const auto s = duhamel_spectra(f.times(), spectra_of(f), f.size() - 1, scheme);
  std::vector<GridField> frames;
  frames.reserve(s.size());
  for (const auto& sp : s) frames.push_back(spectral::inverse(sp));
  return SpaceTimeField(f.times(), std::move(frames));
}

Spectrum divergence_spectrum(const std::vector<Spectrum>& per_axis) {
  require(!per_axis.empty(), ErrorCode::InvalidArgument, "divergence needs one field per axis");
  const Grid& grid = per_axis.front().grid();
  require(static_cast<int>(per_axis.size()) == grid.dim, ErrorCode::InvalidArgument,
          "divergence needs one field per axis");
  const auto modes = spectral::mode_table(grid);
  Spectrum out(grid, per_axis.front().components());
  const auto n = out.mode_count();
  for (int a = 0; a < grid.dim; ++a) {
    kernel::MultiIndex e{0, 0, 0};
    e[a] = 1;
    for (std::size_t p = 0; p < n; ++p) {
      const Complex m = spectral::derivative_symbol(*modes, p, e);
      for (int c = 0; c < out.components(); ++c) out.component(c)[p] += m * per_axis[a].component(c)[p];
    }
  }
  return out;
}

namespace {

std::vector<Spectrum> divergence_forcing(const std::vector<SpaceTimeField>& F) {
  require(!F.empty(), ErrorCode::InvalidArgument, "divergence needs one field per axis");
  const auto frames = F.front().size();
  for (const auto& Fa : F)
    require(Fa.size() == frames && Fa.times() == F.front().times(), ErrorCode::InvalidArgument,
            "per-axis fields must share the frame grid");
  std::vector<Spectrum> out;
  out.reserve(frames);
  for (std::size_t m = 0; m < frames; ++m) {
    std::vector<Spectrum> axes;
    for (const auto& Fa : F) axes.push_back(spectral::forward(Fa.frame(m)));
    out.push_back(divergence_spectrum(axes));
  }
  return out;
}

}  // namespace

GridField apply_S_div(const std::vector<SpaceTimeField>& F, double t_target, const DuhamelScheme& scheme) {
  require(!F.empty(), ErrorCode::InvalidArgument, "divergence needs one field per axis");
  const auto idx = F.front().index_of(t_target);
  const auto s = duhamel_spectra(F.front().times(), divergence_forcing(F), idx, scheme);
  return spectral::inverse(s.back());
}

SpaceTimeField duhamel_div(const std::vector<SpaceTimeField>& F, const DuhamelScheme& scheme) {
  require(!F.empty(), ErrorCode::InvalidArgument, "divergence needs one field per axis");
  const auto& times = F.front().times();
  const auto s = duhamel_spectra(times, divergence_forcing(F), times.size() - 1, scheme);
  std::vector<GridField> frames;
  for (const auto& sp : s) frames.push_back(spectral::inverse(sp));
  return SpaceTimeField(times, std::move(frames));
}

SpaceTimeField ensemble_member(const BoundExperimentConfig& config, int index, int part, BoundMember* info) {
  const Grid& g = config.grid;
  CounterRng rng(config.seed, static_cast<std::uint64_t>(index) * 16 + static_cast<std::uint64_t>(part));
  const double amplitude = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
  const int mode = rng.integer(1, config.max_mode);
  const double power = rng.uniform(0.0, 2.0);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  // direction of the wave vector in 2-D/3-D: one unit step per axis from a draw
  std::array<int, 3> dir{1, 0, 0};
  for (int a = 1; a < g.dim; ++a) dir[a] = rng.integer(-1, 1);
  if (info) *info = {index, mode, amplitude, power, 0.0};
  const auto times = fields::power_time_grid(config.T, config.frames, config.time_exponent);
  const double kk = 2.0 * std::numbers::pi * mode / g.box_length;
  const auto shape = fields::sample(g, 1, [&](auto x, auto v) {
    double ph = phase;
    for (int a = 0; a < g.dim; ++a) ph += kk * dir[a] * x[a];
    v[0] = amplitude * std::cos(ph);
  });
  std::vector<GridField> frames;
  for (double t : times) {
    const double w = (t == 0.0) ? (power == 0.0 ? 1.0 : 0.0) : std::pow(t / config.T, power);
    frames.push_back(w * shape);
  }
  return SpaceTimeField(times, std::move(frames));
}

BoundExperimentResult operator_bound_experiment(const BoundExperimentConfig& config, const DuhamelScheme& scheme) {
  config.grid.validate();
  require(config.members >= 1, ErrorCode::InvalidArgument, "ensemble needs at least one member");
  BoundExperimentResult res;
  res.members = config.members;
  const double T = config.T;
  for (int i = 0; i < config.members; ++i) {
    BoundMember info;
    const auto f = ensemble_member(config, i, 0, &info);
    const double y1 = norms::y1_norm(f, T, config.norm_options).total;
    if (!(y1 > 0.0)) {
      ++res.excluded;
    } else {
      info.ratio = norms::x_norm(duhamel(f, scheme), T, config.norm_options).total / y1;
      res.fitted_S = std::max(res.fitted_S, info.ratio);
      res.S_members.push_back(info);
    }
    std::vector<SpaceTimeField> F;
    BoundMember div_info;
    for (int a = 0; a < config.grid.dim; ++a) F.push_back(ensemble_member(config, i, 1 + a, a == 0 ? &div_info : nullptr));
    const double y2 = norms::y2_norm(norms::pack_components(F), T, config.norm_options).total;
    if (!(y2 > 0.0)) {
      ++res.excluded;
      continue;
    }
    div_info.ratio = norms::x_norm(duhamel_div(F, scheme), T, config.norm_options).total / y2;
    res.fitted_div = std::max(res.fitted_div, div_info.ratio);
    res.div_members.push_back(div_info);
  }
  return res;
}

nlohmann::json to_json(const BoundExperimentResult& r) {
  auto rows = [](const std::vector<BoundMember>& ms) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& m : ms)
      a.push_back({{"index", m.index}, {"mode", m.mode}, {"amplitude", m.amplitude}, {"time_power", m.time_power},
                   {"ratio", m.ratio}});
    return a;
  };
  return {{"fitted_S", r.fitted_S}, {"fitted_div", r.fitted_div}, {"members", r.members},
          {"excluded", r.excluded}, {"S_members", rows(r.S_members)}, {"div_members", rows(r.div_members)}};
}

}  // namespace bihflow::semigroup
