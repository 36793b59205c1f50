#pragma once

// Round sphere S^{l-1} in R^l as a target manifold: a globally defined C^3
// extension of the nearest-point projection y -> y/|y| and its derivatives.
//
// The extension is radial, P(y) = y phi(|y|), with phi(r) = 1/r on
// r >= 1 - tube_radius, phi = const near the origin and a C^3 polynomial
// blend between blend_radius and 1 - tube_radius.

#include <span>
#include <vector>

namespace bihflow::manifold {

using ConstVec = std::span<const double>;
using Vec = std::span<double>;

struct SphereTarget {
  int ambient_dim = 3;
  double tube_radius = 0.5;
  double blend_radius = 0.25;

  void validate() const;

  /// Inner radius 1 - tube_radius of the region where P(y) = y/|y|.
  double exact_radius() const noexcept { return 1.0 - tube_radius; }

  /// True when y lies in the tubular neighborhood | |y| - 1 | <= tube_radius.
  bool in_tube(ConstVec y) const noexcept;
};

/// Radial data at one point: r = |y|, phi(r) and D^m phi for D = (1/r) d/dr.
/// Every derivative of P is a polynomial in y and these coefficients.
struct ProjectionJet {
  double r = 0.0;
  double phi = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

ProjectionJet projection_jet(const SphereTarget& target, ConstVec y);

// Span-based kernels. All vectors have length ambient_dim; out may not alias
// the inputs.
void project(const ProjectionJet& j, ConstVec y, Vec out);
void dpi1(const ProjectionJet& j, ConstVec y, ConstVec v, Vec out);
void dpi2(const ProjectionJet& j, ConstVec y, ConstVec v, ConstVec w, Vec out);
void dpi3(const ProjectionJet& j, ConstVec y, ConstVec u, ConstVec v, ConstVec w, Vec out);

/// Gradient in v of <z, D^2P(y)[v, w]>.
void dpi2_adjoint(const ProjectionJet& j, ConstVec y, ConstVec z, ConstVec w, Vec out);
/// Gradient in u of <z, D^3P(y)[u, v, w]>.
void dpi3_adjoint(const ProjectionJet& j, ConstVec y, ConstVec z, ConstVec v, ConstVec w,
                  Vec out);

// Convenience API returning fresh vectors.
std::vector<double> project(const SphereTarget& target, ConstVec y);

/// Symmetric multilinear derivative D^order P(y) applied to `order` vectors.
/// Throws UnsupportedOrder for order outside {1, 2, 3} or a vector count
/// different from order.
std::vector<double> dpi(const SphereTarget& target, ConstVec y, int order,
                        const std::vector<std::vector<double>>& vectors);

/// Q(y) = y - P(y).
std::vector<double> defect_Q(const SphereTarget& target, ConstVec y);

/// rho(y) = |Q(y)|^2 / 2.
double rho(const SphereTarget& target, ConstVec y);

/// dist(y, S^{l-1}) = | |y| - 1 |.
double sphere_distance(ConstVec y) noexcept;

double dot(ConstVec a, ConstVec b) noexcept;

}  // namespace bihflow::manifold
