#include "bihflow/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

#include <boost/math/quadrature/gauss.hpp>

#include "bihflow/error.hpp"
#include "bihflow/parallel.hpp"

namespace bihflow::kernel {

namespace {

using std::numbers::pi;
using Complex = std::complex<double>;

double sphere_area(int dim) {
  switch (dim) {
    case 1: return 2.0;
    case 2: return 2.0 * pi;
    default: return 4.0 * pi;
  }
}

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

void check_order(int dim, const MultiIndex& order) {
  for (int a = 0; a < 3; ++a) {
    if (order[a] < 0) fail(ErrorCode::UnsupportedOrder, "negative derivative order");
    if (a >= dim && order[a] != 0)
      fail(ErrorCode::UnsupportedOrder, "derivative along an axis beyond the dimension");
  }
  if (order_of(order) > kMaxOrder)
    fail(ErrorCode::UnsupportedOrder,
         "derivative order " + std::to_string(order_of(order)) + " exceeds 4");
}

// Trapezoid density in k needed at |xi|: the aliasing error of the
// trapezoid rule is about |g(2 pi / h - |xi|)|, which decays like
// exp(-alpha s^{4/3}); A is the margin that pushes it below tol / 100.
int effective_nodes(const KernelProfile& p, double xi_norm) {
  const double margin = std::pow(std::log(100.0 / p.tolerance) / decay_rate(), 0.75);
  const int needed = static_cast<int>(std::ceil((xi_norm + margin) / (2.0 * pi)));
  return std::max(p.quadrature_nodes, needed);
}

struct WeightTable {
  double step = 0.0;
  int half_count = 0;            // nodes are j*step for j in [-half_count, half_count]
  std::vector<double> nodes;     // k_j
  std::vector<double> weights;   // trapezoid weight times exp(-|k|^4), tensor layout
};

std::shared_ptr<const WeightTable> weight_table(int dim, int nodes_per_unit, double cutoff) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, double>, std::shared_ptr<const WeightTable>> cache;
  const auto key = std::make_tuple(dim, nodes_per_unit, cutoff);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto table = std::make_shared<WeightTable>();
  table->step = 1.0 / nodes_per_unit;
  table->half_count = static_cast<int>(std::ceil(cutoff * nodes_per_unit));
  const int count = 2 * table->half_count + 1;
  table->nodes.resize(count);
  for (int j = 0; j < count; ++j) table->nodes[j] = (j - table->half_count) * table->step;
  const double h = table->step;
  if (dim == 1) {
    table->weights.resize(count);
    for (int j = 0; j < count; ++j) {
      const double k2 = table->nodes[j] * table->nodes[j];
      table->weights[j] = h * std::exp(-k2 * k2);
    }
  } else if (dim == 2) {
    table->weights.resize(static_cast<std::size_t>(count) * count);
    for (int i = 0; i < count; ++i)
      for (int j = 0; j < count; ++j) {
        const double k2 = table->nodes[i] * table->nodes[i] + table->nodes[j] * table->nodes[j];
        table->weights[static_cast<std::size_t>(i) * count + j] = h * h * std::exp(-k2 * k2);
      }
  } else {
    // Radial: half line s_j = j h, j >= 1 (the s = 0 node carries s^2 = 0).
    table->weights.resize(count);
    for (int j = 0; j < count; ++j) {
      const double s = table->nodes[j];
      table->weights[j] = (s > 0.0) ? h * s * s * std::exp(-s * s * s * s) : 0.0;
    }
  }
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(table)).first->second;
}

Complex ipow(int a) {
  static const Complex powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return powers[a % 4];
}

void check_imaginary(double imag, const KernelProfile& p) {
  if (std::abs(imag) > p.tolerance) {
    std::ostringstream msg;
    msg << "imaginary quadrature residual " << imag << " exceeds tolerance " << p.tolerance;
    fail(ErrorCode::InsufficientResolution, msg.str());
  }
}

void jet_1d(const KernelProfile& p, double xi, ProfileJet& jet) {
  const int q = effective_nodes(p, std::abs(xi));
  const auto table = weight_table(1, q, p.truncation_radius);
  const int max_order = jet.max_order();
  std::array<Complex, kMaxOrder + 1> sums{};
  const auto count = table->nodes.size();
  for (std::size_t j = 0; j < count; ++j) {
    const double k = table->nodes[j];
    Complex term = table->weights[j] * Complex(std::cos(xi * k), std::sin(xi * k));
    for (int a = 0; a <= max_order; ++a) {
      sums[a] += term;
      term *= k;
    }
  }
  const double scale = 1.0 / (2.0 * pi);
  for (int a = 0; a <= max_order; ++a) {
    const Complex v = ipow(a) * sums[a] * scale;
    check_imaginary(v.imag(), p);
    jet.at({a, 0, 0}) = v.real();
  }
}

void jet_2d(const KernelProfile& p, std::span<const double> xi, ProfileJet& jet) {
  const int q = effective_nodes(p, norm_of(xi));
  const auto table = weight_table(2, q, p.truncation_radius);
  const int max_order = jet.max_order();
  const auto count = table->nodes.size();
  std::vector<Complex> phase1(count), phase2(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double k = table->nodes[j];
    phase1[j] = Complex(std::cos(xi[0] * k), std::sin(xi[0] * k));
    phase2[j] = Complex(std::cos(xi[1] * k), std::sin(xi[1] * k));
  }
  // sums[a][b] = sum_ij w_ij k_i^a k_j^b e^{i xi.k}
  std::array<std::array<Complex, kMaxOrder + 1>, kMaxOrder + 1> sums{};
  std::array<Complex, kMaxOrder + 1> row{};
  for (std::size_t i = 0; i < count; ++i) {
    row.fill(Complex{});
    const double* w = table->weights.data() + i * count;
    for (std::size_t j = 0; j < count; ++j) {
      Complex term = w[j] * phase2[j];
      const double k = table->nodes[j];
      for (int b = 0; b <= max_order; ++b) {
        row[b] += term;
        term *= k;
      }
    }
    Complex outer = phase1[i];
    const double k = table->nodes[i];
    for (int a = 0; a <= max_order; ++a) {
      for (int b = 0; a + b <= max_order; ++b) sums[a][b] += outer * row[b];
      outer *= k;
    }
  }
  const double scale = 1.0 / (4.0 * pi * pi);
  for (int a = 0; a <= max_order; ++a)
    for (int b = 0; a + b <= max_order; ++b) {
      const Complex v = ipow(a + b) * sums[a][b] * scale;
      check_imaginary(v.imag(), p);
      jet.at({a, b, 0}) = v.real();
    }
}

// j_m(z) / z^m, regular at z = 0.
double reduced_spherical_bessel(int m, double z) {
  if (z < 4.0) {
    double odd_factorial = 1.0;  // (2m+1)!!
    for (int i = 1; i <= 2 * m + 1; i += 2) odd_factorial *= i;
    double term = 1.0 / odd_factorial;
    double sum = term;
    const double x = -0.5 * z * z;
    for (int p = 1; p < 40; ++p) {
      term *= x / (p * (2.0 * m + 2.0 * p + 1.0));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return std::sph_bessel(static_cast<unsigned>(m), z) / std::pow(z, m);
}

// Radial expansion of ∂^order applied to F(|x|): terms c * x^beta * D^m F
// with D = (1/r) d/dr.
struct RadialTerm {
  double coefficient;
  MultiIndex power;
  int level;
};

std::vector<RadialTerm> radial_expansion(const MultiIndex& order) {
  std::vector<RadialTerm> terms{{1.0, {0, 0, 0}, 0}};
  for (int axis = 0; axis < 3; ++axis) {
    for (int rep = 0; rep < order[axis]; ++rep) {
      std::vector<RadialTerm> next;
      for (const auto& t : terms) {
        if (t.power[axis] > 0) {
          RadialTerm lowered = t;
          lowered.coefficient *= t.power[axis];
          lowered.power[axis] -= 1;
          next.push_back(lowered);
        }
        RadialTerm raised = t;
        raised.power[axis] += 1;
        raised.level += 1;
        next.push_back(raised);
      }
      terms = std::move(next);
    }
  }
  return terms;
}

void jet_3d(const KernelProfile& p, std::span<const double> xi, ProfileJet& jet) {
  const double r = norm_of(xi);
  const int q = effective_nodes(p, r);
  const auto table = weight_table(3, q, p.truncation_radius);
  const int max_order = jet.max_order();
  // levels[m] = D^m F(r), F(r) = (2 pi^2)^{-1} \int_0^inf s^2 j_0(rs) e^{-s^4} ds
  std::array<double, kMaxOrder + 1> levels{};
  for (std::size_t j = 0; j < table->nodes.size(); ++j) {
    const double s = table->nodes[j];
    if (s <= 0.0) continue;
    const double w = table->weights[j];
    double factor = 1.0;
    for (int m = 0; m <= max_order; ++m) {
      levels[m] += w * factor * reduced_spherical_bessel(m, r * s);
      factor *= -s * s;
    }
  }
  for (double& v : levels) v /= 2.0 * pi * pi;
  for (int k = 0; k <= max_order; ++k) {
    for (const auto& order : multi_indices(3, k)) {
      double value = 0.0;
      for (const auto& t : radial_expansion(order)) {
        double mono = t.coefficient;
        for (int a = 0; a < 3; ++a) mono *= std::pow(xi[a], t.power[a]);
        value += mono * levels[t.level];
      }
      jet.at(order) = value;
    }
  }
}

double kernel_scale(double fourth_root_t, int power) {
  double scale = 1.0;
  for (int i = 0; i < power; ++i) scale /= fourth_root_t;
  return scale;
}

// Gauss-Legendre nodes/weights on [-1, 1].
template <int N>
std::pair<std::vector<double>, std::vector<double>> gauss_rule() {
  using Rule = boost::math::quadrature::gauss<double, N>;
  std::vector<double> x, w;
  const auto& a = Rule::abscissa();
  const auto& wt = Rule::weights();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      x.push_back(0.0);
      w.push_back(wt[i]);
    } else {
      x.push_back(a[i]);
      w.push_back(wt[i]);
      x.push_back(-a[i]);
      w.push_back(wt[i]);
    }
  }
  return {x, w};
}

template <class Integrand>
double panel_integral(double lo, double hi, int panels, Integrand&& f) {
  static const auto rule = gauss_rule<8>();
  const double width = (hi - lo) / panels;
  std::vector<double> partial(static_cast<std::size_t>(panels), 0.0);
  parallel_for(static_cast<std::size_t>(panels), [&](std::size_t p) {
    const double a = lo + p * width;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.first.size(); ++i) {
      const double x = a + 0.5 * width * (rule.first[i] + 1.0);
      s += rule.second[i] * f(x);
    }
    partial[p] = 0.5 * width * s;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

double tail_moment(int dim, double c1, double radius) {
  // \int_radius^inf e^{-c1 r} r^{n-1} dr
  const double e = std::exp(-c1 * radius);
  switch (dim) {
    case 1: return e / c1;
    case 2: return e * (radius / c1 + 1.0 / (c1 * c1));
    default: return e * (radius * radius / c1 + 2.0 * radius / (c1 * c1) + 2.0 / (c1 * c1 * c1));
  }
}

std::vector<double> log_space(double lo, double hi, int count) {
  std::vector<double> v;
  if (count == 1) return {lo};
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) v.push_back(std::exp(a + (b - a) * i / (count - 1)));
  v.front() = lo;
  v.back() = hi;
  return v;
}

}  // namespace

double decay_rate() noexcept { return 3.0 * std::cbrt(2.0) / 16.0; }

KernelProfile KernelProfile::make(int dim, double tolerance, int quadrature_nodes) {
  KernelProfile p;
  p.dim = dim;
  p.tolerance = tolerance;
  p.quadrature_nodes = quadrature_nodes;
  require(tolerance > 0.0 && tolerance < 1.0, ErrorCode::InvalidArgument,
          "kernel tolerance must lie in (0, 1)");
  p.truncation_radius = std::pow(std::log(10.0 / tolerance), 0.25) + 1.0;
  p.validate();
  return p;
}

void KernelProfile::validate() const {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "kernel dimension must be 1, 2 or 3");
  require(quadrature_nodes >= 8, ErrorCode::InvalidArgument, "quadrature_nodes must be >= 8");
  require(tolerance > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
  const double k4 = std::pow(truncation_radius, 4);
  require(std::exp(-k4) < tolerance / 10.0, ErrorCode::InvalidArgument,
          "truncation radius leaves a tail above tolerance / 10");
}

KernelProfile KernelProfile::refined() const {
  KernelProfile p = *this;
  p.quadrature_nodes *= 2;
  return p;
}

int order_of(const MultiIndex& order) noexcept { return order[0] + order[1] + order[2]; }

std::vector<MultiIndex> multi_indices(int dim, int k) {
  std::vector<MultiIndex> out;
  for (int a = k; a >= 0; --a) {
    if (dim == 1) {
      if (a == k) out.push_back({a, 0, 0});
      continue;
    }
    for (int b = k - a; b >= 0; --b) {
      const int c = k - a - b;
      if (dim == 2 && c != 0) continue;
      out.push_back({a, b, c});
    }
  }
  return out;
}

double multiplicity(const MultiIndex& order) noexcept {
  auto fact = [](int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
  };
  return fact(order_of(order)) / (fact(order[0]) * fact(order[1]) * fact(order[2]));
}

ProfileJet::ProfileJet(int dim, int max_order)
    : dim_(dim), max_order_(max_order),
      values_(static_cast<std::size_t>((max_order + 1) * (max_order + 1) * (max_order + 1)), 0.0) {}

std::size_t ProfileJet::slot(const MultiIndex& order) const {
  check_order(dim_, order);
  if (order_of(order) > max_order_)
    fail(ErrorCode::UnsupportedOrder, "order not present in this jet");
  const auto m = static_cast<std::size_t>(max_order_ + 1);
  return (static_cast<std::size_t>(order[0]) * m + order[1]) * m + order[2];
}

double ProfileJet::operator()(const MultiIndex& order) const { return values_[slot(order)]; }

double& ProfileJet::at(const MultiIndex& order) { return values_[slot(order)]; }

double ProfileJet::tensor_norm(int k) const {
  double s = 0.0;
  for (const auto& order : multi_indices(dim_, k)) {
    const double v = (*this)(order);
    s += multiplicity(order) * v * v;
  }
  return std::sqrt(s);
}

ProfileJet eval_profile_jet(const KernelProfile& profile, std::span<const double> xi,
                            int max_order) {
  require(static_cast<int>(xi.size()) == profile.dim, ErrorCode::InvalidArgument,
          "point dimension does not match the profile");
  if (max_order < 0 || max_order > kMaxOrder)
    fail(ErrorCode::UnsupportedOrder, "jet order must lie in [0, 4]");
  ProfileJet jet(profile.dim, max_order);
  switch (profile.dim) {
    case 1: jet_1d(profile, xi[0], jet); break;
    case 2: jet_2d(profile, xi, jet); break;
    default: jet_3d(profile, xi, jet); break;
  }
  return jet;
}

double eval_profile(const KernelProfile& profile, std::span<const double> xi,
                    const MultiIndex& order) {
  check_order(profile.dim, order);
  return eval_profile_jet(profile, xi, order_of(order))(order);
}

double eval_kernel(const KernelProfile& profile, std::span<const double> x, double t,
                   const MultiIndex& order) {
  require(t > 0.0, ErrorCode::InvalidTime, "kernel time must be positive");
  check_order(profile.dim, order);
  const double tau = std::sqrt(std::sqrt(t));
  std::array<double, 3> xi{};
  for (int a = 0; a < profile.dim; ++a) xi[a] = x[a] / tau;
  const double g = eval_profile(profile, std::span<const double>(xi.data(), profile.dim), order);
  return kernel_scale(tau, profile.dim + order_of(order)) * g;
}

double kernel_tensor_norm(const KernelProfile& profile, std::span<const double> x, double t,
                          int k) {
  require(t > 0.0, ErrorCode::InvalidTime, "kernel time must be positive");
  const double tau = std::sqrt(std::sqrt(t));
  std::array<double, 3> xi{};
  for (int a = 0; a < profile.dim; ++a) xi[a] = x[a] / tau;
  const auto jet = eval_profile_jet(profile, std::span<const double>(xi.data(), profile.dim), k);
  return kernel_scale(tau, profile.dim + k) * jet.tensor_norm(k);
}

double kernel_mass(const KernelProfile& profile, double t, double radius) {
  require(t > 0.0, ErrorCode::InvalidTime, "kernel time must be positive");
  const double tau = std::sqrt(std::sqrt(t));
  const int dim = profile.dim;
  const int panels = static_cast<int>(std::ceil(radius * 4.0));
  return sphere_area(dim) * panel_integral(0.0, radius * tau, panels, [&](double r) {
           std::array<double, 3> x{r, 0.0, 0.0};
           const double b = eval_kernel(profile, std::span<const double>(x.data(), dim), t, {0, 0, 0});
           return b * std::pow(r, dim - 1);
         });
}

double kernel_gradient_l1(const KernelProfile& profile, double t, int k, double radius,
                          int panels_per_unit) {
  require(t > 0.0, ErrorCode::InvalidTime, "kernel time must be positive");
  if (k < 0 || k > kMaxOrder) fail(ErrorCode::UnsupportedOrder, "order must lie in [0, 4]");
  const double tau = std::sqrt(std::sqrt(t));
  const int dim = profile.dim;
  const int panels = static_cast<int>(std::ceil(radius * panels_per_unit));
  return sphere_area(dim) * panel_integral(0.0, radius * tau, panels, [&](double r) {
           std::array<double, 3> x{r, 0.0, 0.0};
           return kernel_tensor_norm(profile, std::span<const double>(x.data(), dim), t, k) *
                  std::pow(r, dim - 1);
         });
}

Estimate parse_estimate(const std::string& id) {
  if (id == "2.2") return Estimate::PointwiseGaussian;
  if (id == "2.3") return Estimate::PointwisePolynomial;
  if (id == "2.4") return Estimate::GradientL1;
  if (id == "2.5") return Estimate::ExponentialTail;
  fail(ErrorCode::InvalidArgument, "unknown estimate id '" + id + "'");
}

std::string estimate_id(Estimate estimate) {
  switch (estimate) {
    case Estimate::PointwiseGaussian: return "2.2";
    case Estimate::PointwisePolynomial: return "2.3";
    case Estimate::GradientL1: return "2.4";
    case Estimate::ExponentialTail: return "2.5";
  }
  return "?";
}

void SampleSpec::validate() const {
  require(x_min > 0.0 && x_max > x_min && x_count >= 1, ErrorCode::InvalidArgument,
          "bad x sample range");
  require(t_min > 0.0 && t_max >= t_min && t_count >= 1, ErrorCode::InvalidArgument,
          "bad t sample range");
}

SampleSpec SampleSpec::refined() const {
  SampleSpec s = *this;
  s.x_count = 2 * x_count - 1;
  s.t_count = 2 * t_count - 1;
  return s;
}

std::vector<double> SampleSpec::x_values() const {
  auto v = log_space(x_min, x_max, x_count);
  if (include_origin) v.insert(v.begin(), 0.0);
  return v;
}

std::vector<double> SampleSpec::t_values() const { return log_space(t_min, t_max, t_count); }

SampleSpec default_samples(Estimate estimate) {
  SampleSpec s;
  switch (estimate) {
    case Estimate::PointwiseGaussian:
    case Estimate::PointwisePolynomial:
      break;
    case Estimate::GradientL1:
      s.t_min = 1e-2;
      s.t_max = 1e2;
      s.t_count = 3;
      s.x_count = 1;
      s.x_max = 2.0 * s.x_min;
      break;
    case Estimate::ExponentialTail:
      s.x_max = 40.0;
      s.t_min = 1e-3;
      s.t_max = 0.999;
      s.t_count = 30;
      break;
  }
  return s;
}

BoundCertificate certify_bound(const KernelProfile& profile, Estimate estimate, int order,
                               const SampleSpec& samples, const CertifyOptions& options) {
  profile.validate();
  samples.validate();
  const int dim = profile.dim;
  BoundCertificate cert;
  cert.estimate_id = estimate_id(estimate);
  cert.derivative_order = order;

  switch (estimate) {
    case Estimate::PointwiseGaussian:
      if (order != 0) fail(ErrorCode::UnsupportedOrder, "the Gaussian estimate is for order 0");
      cert.alpha_or_c1 = decay_rate();
      break;
    case Estimate::PointwisePolynomial:
    case Estimate::GradientL1:
      if (order < 1 || order > kMaxOrder)
        fail(ErrorCode::UnsupportedOrder, "estimate " + cert.estimate_id + " needs order in [1, 4]");
      break;
    case Estimate::ExponentialTail:
      if (order < 0 || order > kMaxOrder)
        fail(ErrorCode::UnsupportedOrder, "the tail estimate needs order in [0, 4]");
      require(options.tail_rate > 0.0, ErrorCode::InvalidArgument, "c1 must be positive");
      cert.alpha_or_c1 = options.tail_rate;
      break;
  }

  const auto ts = samples.t_values();

  if (estimate == Estimate::GradientL1) {
    for (double t : ts) {
      const double l1 = kernel_gradient_l1(profile, t, order, options.l1_radius,
                                           options.l1_panels_per_unit);
      const double scaled = std::pow(t, order / 4.0) * l1;
      cert.scaled_l1.emplace_back(t, scaled);
      ++cert.samples;
      if (scaled > cert.fitted_constant) {
        cert.fitted_constant = scaled;
        cert.max_t = t;
      }
    }
    // Tail beyond l1_radius (self-similar units) bounded by c e^{-c1 r}.
    const auto tail = certify_bound(profile, Estimate::ExponentialTail, order,
                                    default_samples(Estimate::ExponentialTail), options);
    cert.tail_bound = tail.fitted_constant * sphere_area(dim) *
                      tail_moment(dim, options.tail_rate, options.l1_radius);
    return cert;
  }

  const auto xs = samples.x_values();
  struct Sample {
    double x, t;
  };
  std::vector<Sample> lattice;
  for (double t : ts)
    for (double x : xs) {
      if (estimate == Estimate::ExponentialTail) {
        if (!(t > 0.0 && t < 1.0)) continue;
        if (x < 2.0 && t < 0.5) continue;
      }
      lattice.push_back({x, t});
    }

  constexpr double kExcluded = -1.0;
  std::vector<double> ratios(lattice.size(), kExcluded);
  const double floor = options.underflow_factor * profile.tolerance;
  parallel_for(lattice.size(), [&](std::size_t i) {
    const auto [x, t] = lattice[i];
    const double tau = std::sqrt(std::sqrt(t));
    const double xi = x / tau;
    // rhs_profile: right-hand side expressed at the profile level, i.e.
    // multiplied by t^{(n+k)/4}; this is what the quadrature error competes with.
    double rhs = 0.0, rhs_profile = 0.0;
    switch (estimate) {
      case Estimate::PointwiseGaussian:
        rhs_profile = std::exp(-decay_rate() * std::pow(xi, 4.0 / 3.0));
        rhs = kernel_scale(tau, dim) * rhs_profile;
        break;
      case Estimate::PointwisePolynomial:
        rhs = std::pow(tau + x, -(dim + order));
        rhs_profile = std::pow(1.0 + xi, -(dim + order));
        break;
      case Estimate::ExponentialTail:
        rhs = std::exp(-options.tail_rate * x);
        rhs_profile = rhs / kernel_scale(tau, dim + order);
        break;
      case Estimate::GradientL1:
        break;
    }
    if (!(rhs > 0.0) || rhs_profile < floor) return;
    std::array<double, 3> point{x, 0.0, 0.0};
    const double lhs =
        kernel_tensor_norm(profile, std::span<const double>(point.data(), dim), t, order);
    ratios[i] = lhs / rhs;
  });

  for (std::size_t i = 0; i < lattice.size(); ++i) {
    if (ratios[i] == kExcluded) {
      ++cert.excluded;
      continue;
    }
    ++cert.samples;
    if (ratios[i] > cert.fitted_constant) {
      cert.fitted_constant = ratios[i];
      cert.max_x = lattice[i].x;
      cert.max_t = lattice[i].t;
    }
  }
  return cert;
}

nlohmann::json to_json(const BoundCertificate& c) {
  nlohmann::json j;
  j["estimate_id"] = c.estimate_id;
  j["order"] = c.derivative_order;
  j["fitted_constant"] = c.fitted_constant;
  j["alpha_or_c1"] = c.alpha_or_c1;
  j["samples"] = c.samples;
  j["excluded"] = c.excluded;
  j["max_location"] = {{"x", c.max_x}, {"t", c.max_t}};
  if (c.estimate_id == "2.4") {
    j["tail_bound"] = c.tail_bound;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [t, v] : c.scaled_l1) rows.push_back({{"t", t}, {"scaled_l1", v}});
    j["scaled_l1"] = rows;
  }
  return j;
}

}  // namespace bihflow::kernel
