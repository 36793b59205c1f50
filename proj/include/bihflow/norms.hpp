#pragma once

// Function-space functionals on discrete fields: local BMO seminorm,
// Carleson functional, and the X_T, Y^1_T, Y^2_T norms.
//
// Suprema over (x, r) are taken over all lattice centers and dyadic radii,
// so every value is a lower-bound estimator of the continuum supremum.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "bihflow/fields.hpp"
#include "bihflow/kernel.hpp"

namespace bihflow::norms {

using fields::Grid;
using fields::GridField;
using fields::SpaceTimeField;

/// Result of a sup over centers and a radius list.
struct ScaleScan {
  double value = 0.0;
  /// (r, sup over centers at that r)
  std::vector<std::pair<double, double>> per_scale;
  std::size_t argmax_point = 0;
  double argmax_radius = 0.0;
};

/// R, R/2, R/4, ... down to the last radius >= 2h. Throws ScaleUnresolvable
/// when R <= 2h and InvalidArgument when R > L/2.
std::vector<double> dyadic_radii(const Grid& grid, double R);

/// sup over centers and the given radii of r^{-n} \int_{B_r(x)} |f - f_{x,r}|,
/// where f_{x,r} is the mean over the lattice ball and |.| is Euclidean on the
/// codomain.
ScaleScan bmo_scan(const GridField& f, const std::vector<double>& radii);

/// Dyadic estimator of [f]_{BMO_R}.
double bmo_seminorm(const GridField& f, double R);

/// Exhaustive oracle over every radius k h <= R, k >= 1.
double bmo_bruteforce(const GridField& f, double R);

struct CarlesonOptions {
  /// Geometric time nodes per factor two in t.
  int nodes_per_octave = 8;
  /// The t-integral starts where t * k_max reaches this value; below it the
  /// integrand is O((t k_max)^{2i}).
  double small_scale = 1e-3;
};

/// sup over centers and dyadic r <= R of r^{-n} \int_0^r \int_{B_r(x)}
/// |Phi_t * f|^2 dx dt / t with Phi = ∇^i g, evaluated spectrally as
/// t^i ∇^i (G f)(., t^4); |.| sums all components of f and of the tensor.
ScaleScan carleson_scan(const GridField& f, const kernel::KernelProfile& profile, int order, double R,
                        const CarlesonOptions& options = {});

double carleson_functional(const GridField& f, const kernel::KernelProfile& profile, int order,
                           double R, const CarlesonOptions& options = {});

/// Integrals \int_0^{r^4} \int_{B_r(x)} D_term(y, t) dy dt for every center,
/// radius and density term. densities(m) returns one density array per term
/// for frame m; the time quadrature is the trapezoid rule over the frames,
/// with linear interpolation on the interval containing r^4. Result is
/// indexed [radius][term][center].
std::vector<std::vector<std::vector<double>>> cylinder_integrals(
    const Grid& grid, const std::vector<double>& times, const std::vector<double>& radii, int terms,
    const std::function<std::vector<std::vector<double>>(std::size_t)>& densities);

struct NormOptions {
  /// Number of dyadic cylinder radii T^{1/4}, T^{1/4}/2, ... (those below 2h
  /// are dropped).
  int scales = 3;
};

struct NormReport {
  std::string norm;
  double sup_part = 0.0;
  double seminorm_part = 0.0;
  double total = 0.0;
  std::map<std::string, double> terms;
  std::vector<std::string> scale_columns;
  /// rows of (r, value per column)
  std::vector<std::pair<double, std::vector<double>>> per_scale;
  std::string argmax_term;
  double argmax_time = 0.0;
  double argmax_radius = 0.0;
  std::vector<double> argmax_point;
};

/// Cylinder radii used by the norms for final time T.
std::vector<double> cylinder_radii(const Grid& grid, const std::vector<double>& times, double T,
                                   const NormOptions& options);

NormReport x_norm(const SpaceTimeField& u, double T, const NormOptions& options = {});
NormReport y1_norm(const SpaceTimeField& f, double T, const NormOptions& options = {});
NormReport y2_norm(const SpaceTimeField& f, double T, const NormOptions& options = {});

/// Concatenates the codomains of same-grid fields, e.g. the per-axis parts
/// F_1..F_n of a divergence-form forcing, so their Y norm uses the full
/// Euclidean norm |F|.
SpaceTimeField pack_components(const std::vector<SpaceTimeField>& parts);

nlohmann::json to_json(const NormReport& report);
nlohmann::json to_json(const ScaleScan& scan);

}  // namespace bihflow::norms
