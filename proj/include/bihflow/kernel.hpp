#pragma once

// Biharmonic heat kernel b(x,t) = t^{-n/4} g(x / t^{1/4}) on R^n, with
//
//   g(xi) = (2 pi)^{-n} \int_{R^n} exp(i xi.k - |k|^4) dk,
//
// its spatial derivatives up to order 4, and numerical certificates for the
// classical pointwise and L^1 bounds on b.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace bihflow::kernel {

/// Per-axis derivative orders; axes beyond the dimension must be zero.
using MultiIndex = std::array<int, 3>;

inline constexpr int kMaxOrder = 4;

/// Exact Gaussian-tail rate alpha = 3 * 2^{1/3} / 16 of the pointwise bound.
double decay_rate() noexcept;

struct KernelProfile {
  int dim = 1;
  /// Cutoff K of the k-integral; exp(-K^4) < tolerance / 10.
  double truncation_radius = 0.0;
  /// Minimum trapezoid nodes per unit length in k.
  int quadrature_nodes = 16;
  /// Absolute error target for g and its derivatives.
  double tolerance = 1e-12;

  /// Builds a profile with K = (ln(10/tol))^{1/4} + 1.
  static KernelProfile make(int dim, double tolerance = 1e-12, int quadrature_nodes = 16);

  void validate() const;

  /// Same profile with twice the quadrature density.
  KernelProfile refined() const;
};

int order_of(const MultiIndex& order) noexcept;

/// All multi-indices of total order k in the given dimension, in
/// lexicographic order.
std::vector<MultiIndex> multi_indices(int dim, int k);

/// Number of index tuples (i_1..i_k) that reorder to the multi-index,
/// k! / (a_1! ... a_n!).
double multiplicity(const MultiIndex& order) noexcept;

/// ∂^order g(xi). Throws UnsupportedOrder for |order| > 4 and
/// InsufficientResolution when the discarded imaginary part of the
/// quadrature exceeds the tolerance.
double eval_profile(const KernelProfile& profile, std::span<const double> xi,
                    const MultiIndex& order);

/// Derivatives of g at one point for every multi-index with |order| <= max_order.
class ProfileJet {
 public:
  ProfileJet(int dim, int max_order);

  double operator()(const MultiIndex& order) const;
  double& at(const MultiIndex& order);

  int dim() const noexcept { return dim_; }
  int max_order() const noexcept { return max_order_; }

  /// Frobenius norm of the order-k derivative tensor,
  /// sqrt(sum over index tuples of (∂_{i1..ik} g)^2).
  double tensor_norm(int k) const;

 private:
  std::size_t slot(const MultiIndex& order) const;

  int dim_;
  int max_order_;
  std::vector<double> values_;
};

ProfileJet eval_profile_jet(const KernelProfile& profile, std::span<const double> xi,
                            int max_order);

/// ∂^order_x b(x,t) = t^{-(n+|order|)/4} (∂^order g)(x t^{-1/4}). Throws
/// InvalidTime for t <= 0.
double eval_kernel(const KernelProfile& profile, std::span<const double> x, double t,
                   const MultiIndex& order);

/// |∇^k b(x,t)| as a tensor norm.
double kernel_tensor_norm(const KernelProfile& profile, std::span<const double> x, double t,
                          int k);

/// \int b(x,t) dx by radial Gauss-Legendre quadrature out to |x| = radius t^{1/4}.
double kernel_mass(const KernelProfile& profile, double t, double radius = 48.0);

/// ||∇^k b(.,t)||_{L^1} over |x| <= radius t^{1/4}, by radial quadrature of
/// the (rotation invariant) tensor norm.
double kernel_gradient_l1(const KernelProfile& profile, double t, int k, double radius = 20.0,
                          int panels_per_unit = 16);

enum class Estimate { PointwiseGaussian, PointwisePolynomial, GradientL1, ExponentialTail };

Estimate parse_estimate(const std::string& id);
std::string estimate_id(Estimate estimate);

/// Log-spaced sample lattice. |x| values are taken along the first axis
/// (every certified quantity is rotation invariant); x = 0 is added when
/// include_origin is set.
struct SampleSpec {
  double x_min = 1e-2;
  double x_max = 30.0;
  int x_count = 60;
  double t_min = 1e-2;
  double t_max = 1e2;
  int t_count = 24;
  bool include_origin = true;

  void validate() const;
  SampleSpec refined() const;
  std::vector<double> x_values() const;
  std::vector<double> t_values() const;
};

/// Defaults per estimate: the tail estimate lives on t in (0,1).
SampleSpec default_samples(Estimate estimate);

struct CertifyOptions {
  /// Exponential rate c_1 of the tail estimate (a configuration choice).
  double tail_rate = 0.5;
  /// Radius (in self-similar units) of the truncated L^1 domain.
  double l1_radius = 20.0;
  int l1_panels_per_unit = 16;
  /// Samples whose right-hand side falls below underflow_factor * tolerance
  /// (relative to the t^{-n/4} scale) are unresolvable and excluded.
  double underflow_factor = 1e3;
};

struct BoundCertificate {
  std::string estimate_id;
  int derivative_order = 0;
  double fitted_constant = 0.0;
  /// alpha for the Gaussian estimate, c_1 for the tail estimate, 0 otherwise.
  double alpha_or_c1 = 0.0;
  int samples = 0;
  int excluded = 0;
  double max_x = 0.0;
  double max_t = 0.0;
  /// For the L^1 estimate: bound on the neglected tail beyond l1_radius,
  /// obtained from the exponential tail estimate.
  double tail_bound = 0.0;
  /// For the L^1 estimate: t^{k/4} ||∇^k b(.,t)||_{L^1} per sampled t.
  std::vector<std::pair<double, double>> scaled_l1;
};

BoundCertificate certify_bound(const KernelProfile& profile, Estimate estimate, int order,
                               const SampleSpec& samples, const CertifyOptions& options = {});

nlohmann::json to_json(const BoundCertificate& certificate);

}  // namespace bihflow::kernel
