#pragma once

// Biharmonic map heat flow into the round sphere: nonlinearities, Picard
// iteration of the Duhamel map, and constraint / distance diagnostics.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "bihflow/error.hpp"
#include "bihflow/fields.hpp"
#include "bihflow/kernel.hpp"
#include "bihflow/manifold.hpp"
#include "bihflow/norms.hpp"
#include "bihflow/semigroup.hpp"

namespace bihflow::flow {

using fields::Grid;
using fields::GridField;
using fields::SpaceTimeField;
using manifold::SphereTarget;

enum class Mode { Extrinsic, Intrinsic };
enum class TubeExitPolicy { Error, ClampAndFlag };

Mode parse_mode(const std::string& s);
std::string to_string(Mode mode);
TubeExitPolicy parse_policy(const std::string& s);
std::string to_string(TubeExitPolicy policy);

struct FlowConfig {
  Grid grid{1, 8.0, 128};
  SphereTarget target{};
  double T = 1.0;
  int frames = 64;
  double time_exponent = 4.0;
  Mode mode = Mode::Extrinsic;
  int max_picard_iters = 30;
  double picard_tol = 1e-10;
  TubeExitPolicy tube_exit_policy = TubeExitPolicy::Error;
  semigroup::DuhamelScheme scheme{};
  norms::NormOptions norm_options{};
  /// Allowance for sup_t \int rho(u(t)) relative to the box volume.
  double constraint_tol = 1e-6;
  /// Random ambient directions per frame for the orthogonality probe.
  int orthogonality_probes = 4;
  std::uint64_t seed = 1;

  void validate() const;
  std::vector<double> times() const;
};

/// Counts of tube violations met while evaluating nonlinearities.
struct TubeReport {
  std::size_t clamped = 0;
  double worst_distance = 0.0;
};

struct Nonlinearities {
  GridField F1;
  std::vector<GridField> F2;  // one field per spatial axis
  GridField F3;
};

/// F1, F2 and F3 of one frame, with every spatial derivative taken
/// spectrally. Throws ManifoldTubeExit (with location and |u|) when a value
/// leaves the tube and the policy is Error; with ClampAndFlag the value fed
/// to the projection derivatives is pulled radially back to the tube boundary.
Nonlinearities nonlinearities(const GridField& u, const SphereTarget& target,
                              TubeExitPolicy policy = TubeExitPolicy::Error, TubeReport* report = nullptr);

GridField nonlinearity_F1(const GridField& u, const SphereTarget& target,
                          TubeExitPolicy policy = TubeExitPolicy::Error);
std::vector<GridField> nonlinearity_F2(const GridField& u, const SphereTarget& target,
                                       TubeExitPolicy policy = TubeExitPolicy::Error);
GridField nonlinearity_F3(const GridField& u, const SphereTarget& target,
                          TubeExitPolicy policy = TubeExitPolicy::Error);

/// Per-frame constraint measurements.
struct ConstraintDiagnostics {
  std::vector<double> times;
  std::vector<double> sup_distance;
  std::vector<double> rho_mass;
  /// max over points and probes of |<DP(P(u)) v, Q(u)>| per frame
  std::vector<double> orthogonality;
  double max_rho_mass = 0.0;
  double max_orthogonality = 0.0;
  double max_distance = 0.0;
  bool constraint_flag = false;
};

ConstraintDiagnostics constraint_diagnostics(const SpaceTimeField& u, const SphereTarget& target,
                                             double constraint_tol = 1e-6, int probes = 4,
                                             std::uint64_t seed = 1);

struct FlowDiagnostics {
  /// ||u^(k)||_X for k = 0, 1, ...
  std::vector<double> iterate_norms;
  /// d_k = ||u^(k) - u^(k-1)||_X for k = 1, 2, ...
  std::vector<double> differences;
  /// theta_k = d_{k+1} / d_k
  std::vector<double> ratios;
  bool converged = false;
  int iterations = 0;
  std::string status = "running";
  TubeReport tube;
  ConstraintDiagnostics constraint;
  double max_ratio() const;
};

struct FlowResult {
  SpaceTimeField solution;
  FlowDiagnostics diagnostics;
};

/// Raised when theta_k >= 1 for three consecutive iterations; carries the
/// diagnostics and the last iterate.
class ContractionFailure : public Error {
 public:
  ContractionFailure(const std::string& message, std::shared_ptr<FlowResult> result);
  const FlowResult& result() const noexcept { return *result_; }

 private:
  std::shared_ptr<FlowResult> result_;
};

/// One application of the Duhamel map: G u0 + S(F1[u]) + S(∇·F2[u])
/// (+ S(F3[u]) in intrinsic mode), evaluated on the frames of u.
SpaceTimeField duhamel_map(const FlowConfig& config, const GridField& u0, const SpaceTimeField& u,
                           TubeReport* report = nullptr);

/// Picard iteration u^(0) = G u0, u^(k+1) = T u^(k) on whole trajectories.
FlowResult picard_solve(const FlowConfig& config, const GridField& u0);

/// ||u - T u||_X for a trajectory.
double fixed_point_residual(const FlowConfig& config, const GridField& u0, const SpaceTimeField& u);

/// Equator perturbation (cos(eps s), sin(eps s), 0, ...) with s = sin(2 pi m x_1 / L).
GridField equator_map(const Grid& grid, int ambient_dim, double eps, int mode = 1);

/// Great-circle map (cos(2 pi x_1 / L), sin(2 pi x_1 / L), 0, ...).
GridField circle_map(const Grid& grid, int ambient_dim, int winding = 1);

/// Constant map to a point of the sphere.
GridField constant_map(const Grid& grid, const std::vector<double>& point);

struct SweepRow {
  double amplitude = 0.0;
  double bmo = 0.0;
  double theta_max = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string status;
};

/// Picard runs over the equator family, one per amplitude; [u0]_BMO is
/// measured at R = min(T^{1/4}, L/2).
std::vector<SweepRow> contraction_sweep(const FlowConfig& config, const std::vector<double>& amplitudes);

struct DistanceRow {
  double t = 0.0;
  double lhs = 0.0;
  double bmo_radius = 0.0;
  double bmo = 0.0;
  double rhs = 0.0;
};

struct DistanceReport {
  double K = 0.0;
  double delta = 0.0;
  double R = 0.0;
  /// fitted constant c of |g(y)| <= c exp(-alpha |y|^{4/3})
  double kernel_constant = 0.0;
  double tail_constant = 0.0;
  std::vector<DistanceRow> rows;
  int skipped = 0;
  bool holds = true;
  double min_slack = 0.0;
};

/// Smallest K on a 1/64 lattice with C_N \int_K^inf e^{-alpha r^{4/3}} r^{n-1} dr <= delta,
/// C_N = 2 ||u0||_inf c |S^{n-1}|.
double distance_K(int dim, double tail_constant, double delta);

/// Compares sup_x dist(G u0(x, t), S^{l-1}) with K^n [u0]_{BMO_{K t^{1/4}}} + delta
/// for sampled t <= R^4 / K^4; times where K t^{1/4} is not above two grid
/// spacings are skipped and counted.
DistanceReport distance_experiment(const GridField& u0, double R, double delta, int samples = 12,
                                   const kernel::KernelProfile* profile = nullptr);

struct HeatEstimateRow {
  double R = 0.0;
  double bmo = 0.0;
  double sup_norm = 0.0;
  /// sup_{x, r <= R} r^{-n} \int_{P_r} (|∇^2 u|^2 + r^{-2} |∇u|^2)
  double cylinder = 0.0;
  /// sup_{0 < t <= R^4} sum_i t^{i/4} ||∇^i u(t)||_inf
  double weighted_sup = 0.0;
  /// sup_{x, r <= R} r^{-n} \int_{P_r} |∇u|^4
  double quartic = 0.0;
};

/// Left-hand sides of the free-evolution estimates for G u0 on [0, R^4]
/// together with [u0]_{BMO_R} and ||u0||_inf.
HeatEstimateRow heat_estimates(const GridField& u0, double R, int frames = 33, int scales = 3);

nlohmann::json to_json(const FlowDiagnostics& d);
nlohmann::json to_json(const ConstraintDiagnostics& c);
nlohmann::json to_json(const DistanceReport& r);

}  // namespace bihflow::flow
