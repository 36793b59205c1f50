#pragma once

// Configuration, experiment orchestration and report emission.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "bihflow/flow.hpp"
#include "bihflow/io.hpp"
#include "bihflow/kernel.hpp"
#include "bihflow/semigroup.hpp"

namespace bihflow::harness {

namespace fs = std::filesystem;

enum class InitialKind { Equator, Circle, Constant };

struct InitialData {
  InitialKind kind = InitialKind::Equator;
  double amplitude = 0.05;
  int winding = 1;
  std::vector<double> point{0.0, 0.0, 1.0};
};

struct KernelSettings {
  std::vector<int> dims{1};
  /// derivative orders certified for 2.3, 2.4 and 2.5; 2.2 is always order 0
  std::vector<int> orders{1};
  double tolerance = 1e-12;
  int quadrature_nodes = 16;
  double tail_rate = 0.5;
};

struct RunSettings {
  std::uint64_t seed = 1;
  int threads = 1;
  int members = 64;
  std::vector<double> amplitudes{0.02, 0.05, 0.1};
  /// oscillatory test family of the norm tables: equator maps with these
  /// amplitudes and spatial modes
  std::vector<double> family{0.1, 0.2, 0.4};
  std::vector<int> family_modes{8, 16};
  double distance_delta = 0.05;
  /// 0 selects min(T^{1/4}, L/2)
  double distance_R = 0.0;
  int distance_samples = 12;
  io::FrameFormat frame_format = io::FrameFormat::Csv;
};

struct RunConfig {
  flow::FlowConfig flow;
  InitialData initial;
  KernelSettings kernel;
  RunSettings run;

  void validate() const;
  /// Operator-bound ensemble settings derived from the grid/time sections.
  semigroup::BoundExperimentConfig bound_config() const;
  double distance_radius() const;
};

/// Parses the sectioned INI text ([grid], [target], [time], [picard], [mode],
/// [initial], [kernel], [norms], [run]). Unknown sections or keys and
/// malformed values raise ConfigParse naming the offending entry.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const fs::path& path);

/// INI text that parses back to the same configuration.
std::string dump_config(const RunConfig& config);
nlohmann::json config_snapshot(const RunConfig& config);

flow::GridField initial_data(const RunConfig& config);

struct FamilyMember {
  int mode = 0;
  double amplitude = 0.0;
  double bmo = 0.0;
  double carleson_grad = 0.0;
  double carleson_hess = 0.0;
  double x_norm_free = 0.0;
  std::vector<flow::HeatEstimateRow> heat;  // one row per radius
};

/// Oscillatory-family study at R0 = distance_radius() and its dyadic halves:
/// BMO, Carleson functionals, and the free-evolution estimates with fitted
/// constants (max over the family) per radius.
struct FamilyStudy {
  std::vector<double> radii;
  std::vector<FamilyMember> members;
  double carleson_grad_constant = 0.0;
  double carleson_hess_constant = 0.0;
  /// per radius: max over members of cylinder / bmo^2, weighted_sup / bmo,
  /// quartic / (||u0||^2 bmo^2)
  std::vector<double> cylinder_constant, weighted_constant, quartic_constant;
  /// max / min - 1 over the radii
  double cylinder_drift = 0.0, weighted_drift = 0.0, quartic_drift = 0.0;
};

FamilyStudy family_study(const RunConfig& config, int scales = 3);
nlohmann::json to_json(const FamilyStudy& s);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::string version;
  double wall_time = 0.0;
  std::vector<std::string> files;
  std::vector<CheckResult> checks;
  std::string status = "running";

  bool passed() const;
};

nlohmann::json to_json(const RunManifest& m);

std::vector<std::string> suite_ids();

/// Runs one suite (kernel, operators, norms, flow, distance, all) and writes
/// its reports below out_dir. The manifest (out_dir/manifest.json) is written
/// before any other output and rewritten on completion. Hard checks are
/// recorded in the manifest; fitted constants are reported but never fail.
RunManifest run_suite(const std::string& suite, const RunConfig& config, const fs::path& out_dir,
                      const std::string& command = "");

/// contraction-sweep: CSV of (amplitude, bmo, theta_max, converged, ...) for
/// the given amplitudes.
RunManifest run_contraction_sweep(const RunConfig& config, const std::vector<double>& amplitudes,
                                  const fs::path& out_dir, const std::string& command = "");

std::string version() noexcept;

}  // namespace bihflow::harness
