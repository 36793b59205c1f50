#pragma once

// Linear solution operators of (∂_t + Δ^2) u = f on the periodic grid:
// free evolution G u0 and the Duhamel operators S f, S(∇·F), integrated
// exactly per Fourier mode for forcings that are piecewise linear in time.

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "bihflow/fields.hpp"
#include "bihflow/norms.hpp"
#include "bihflow/spectral.hpp"

namespace bihflow::semigroup {

using fields::Grid;
using fields::GridField;
using fields::SpaceTimeField;
using spectral::Spectrum;

struct DuhamelScheme {
  /// Below this z the phi-functions use their Taylor series.
  double phi_threshold = 1e-2;
};

/// phi1(z) = (1 - e^{-z}) / z, phi2(z) = (1 - phi1(z)) / z.
double phi1(double z, const DuhamelScheme& scheme = {});
double phi2(double z, const DuhamelScheme& scheme = {});

/// Multiplies every mode by e^{-t |k|^4}; t = 0 returns u0 unchanged.
GridField apply_G(const GridField& u0, double t);
Spectrum apply_G(const Spectrum& u0, double t);

/// Free evolution sampled at the given times.
SpaceTimeField free_evolution(const GridField& u0, const std::vector<double>& times);

/// Duhamel integrals S_m = \int_0^{t_m} e^{-(t_m - s)|k|^4} f(s) ds per mode for
/// m = 0..last, with f linearly interpolated between frames.
std::vector<Spectrum> duhamel_spectra(const std::vector<double>& times, const std::vector<Spectrum>& forcing,
                                      std::size_t last, const DuhamelScheme& scheme = {});

/// S f at a frame time; throws TimeMisaligned when t_target is not a frame.
GridField apply_S(const SpaceTimeField& f, double t_target, const DuhamelScheme& scheme = {});

/// S f at every frame time.
SpaceTimeField duhamel(const SpaceTimeField& f, const DuhamelScheme& scheme = {});

/// Fourier forcing of the divergence form: sum_a i k_a F_a per mode.
Spectrum divergence_spectrum(const std::vector<Spectrum>& per_axis);

/// S(sum_a ∂_a F_a) at a frame time; F holds one field per axis.
GridField apply_S_div(const std::vector<SpaceTimeField>& F, double t_target, const DuhamelScheme& scheme = {});

/// S(∇·F) at every frame time.
SpaceTimeField duhamel_div(const std::vector<SpaceTimeField>& F, const DuhamelScheme& scheme = {});

struct BoundExperimentConfig {
  Grid grid{1, 8.0, 128};
  double T = 1.0;
  int frames = 33;
  double time_exponent = 4.0;
  int members = 64;
  std::uint64_t seed = 1;
  /// Integer spatial modes are drawn from [1, max_mode].
  int max_mode = 8;
  norms::NormOptions norm_options{};
};

struct BoundMember {
  int index = 0;
  int mode = 0;
  double amplitude = 0.0;
  double time_power = 0.0;
  double ratio = 0.0;
};

struct BoundExperimentResult {
  /// max over members of ||S f||_X / ||f||_{Y1}
  double fitted_S = 0.0;
  /// max over members of ||S(∇·F)||_X / ||F||_{Y2}
  double fitted_div = 0.0;
  int members = 0;
  int excluded = 0;
  std::vector<BoundMember> S_members;
  std::vector<BoundMember> div_members;
};

/// Member i of the seeded forcing ensemble: a f(x) (s/T)^p with a single
/// Fourier mode; member draws depend only on (seed, i), so a larger ensemble
/// contains every member of a smaller one.
SpaceTimeField ensemble_member(const BoundExperimentConfig& config, int index, int part, BoundMember* info = nullptr);

BoundExperimentResult operator_bound_experiment(const BoundExperimentConfig& config,
                                                const DuhamelScheme& scheme = {});

nlohmann::json to_json(const BoundExperimentResult& result);

}  // namespace bihflow::semigroup
