#include "bihflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "bihflow/parallel.hpp"
#include "bihflow/rng.hpp"
#include "bihflow/spectral.hpp"

namespace bihflow::flow {

namespace {

using kernel::MultiIndex;
using spectral::Spectrum;

MultiIndex unit(int a) {
  MultiIndex e{0, 0, 0};
  e[a] = 1;
  return e;
}

MultiIndex pair_index(int a, int b) {
  MultiIndex e{0, 0, 0};
  e[a] += 1;
  e[b] += 1;
  return e;
}

// Spectral derivatives of one frame: ∇u per axis, the upper triangle of ∇^2 u
// and Δu.
struct FrameJet {
  std::vector<GridField> grad;
  std::vector<std::vector<GridField>> hess;  // hess[a][b] for b >= a
  GridField lap;

  const GridField& H(int a, int b) const { return a <= b ? hess[a][b - a] : hess[b][a - b]; }
};

FrameJet frame_jet(const GridField& u) {
  const int n = u.grid().dim;
  const auto s = spectral::forward(u);
  FrameJet j;
  for (int a = 0; a < n; ++a) j.grad.push_back(spectral::inverse(spectral::derivative(s, unit(a))));
  j.hess.resize(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) j.hess[a].push_back(spectral::inverse(spectral::derivative(s, pair_index(a, b))));
  j.lap = j.H(0, 0);
  for (int a = 1; a < n; ++a) j.lap += j.H(a, a);
  return j;
}

std::string location(const Grid& g, std::size_t p) {
  std::ostringstream os;
  os << "(";
  for (int a = 0; a < g.dim; ++a) os << (a ? ", " : "") << g.coordinate(p, a);
  os << ")";
  return os.str();
}

// Radially pulls y back into the closed tube; returns true when moved.
bool clamp_to_tube(const SphereTarget& target, std::span<double> y) {
  const double r = std::sqrt(manifold::dot(y, y));
  const double lo = 1.0 - target.tube_radius, hi = 1.0 + target.tube_radius;
  if (r >= lo && r <= hi) return false;
  if (r == 0.0) {
    y[0] = lo;
    return true;
  }
  const double s = (r > hi ? hi : lo) / r;
  for (auto& v : y) v *= s;
  return true;
}

constexpr std::size_t kChunk = 64;

double sphere_area(int n) {
  // |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace

Mode parse_mode(const std::string& s) {
  if (s == "extrinsic") return Mode::Extrinsic;
  if (s == "intrinsic") return Mode::Intrinsic;
  fail(ErrorCode::InvalidArgument, "unknown mode '" + s + "' (expected extrinsic or intrinsic)");
}

std::string to_string(Mode mode) { return mode == Mode::Extrinsic ? "extrinsic" : "intrinsic"; }

TubeExitPolicy parse_policy(const std::string& s) {
  if (s == "error") return TubeExitPolicy::Error;
  if (s == "clamp-and-flag" || s == "clamp") return TubeExitPolicy::ClampAndFlag;
  fail(ErrorCode::InvalidArgument, "unknown tube exit policy '" + s + "' (expected error or clamp-and-flag)");
}

std::string to_string(TubeExitPolicy policy) {
  return policy == TubeExitPolicy::Error ? "error" : "clamp-and-flag";
}

void FlowConfig::validate() const {
  grid.validate();
  target.validate();
  require(T > 0.0, ErrorCode::InvalidTime, "final time T must be positive");
  require(frames >= 2, ErrorCode::InvalidArgument, "need at least two time frames");
  require(time_exponent > 0.0, ErrorCode::InvalidArgument, "time grid exponent must be positive");
  require(picard_tol > 0.0, ErrorCode::InvalidArgument, "picard_tol must be positive");
  require(max_picard_iters >= 2, ErrorCode::InvalidArgument, "max_picard_iters must be at least 2");
  require(constraint_tol > 0.0, ErrorCode::InvalidArgument, "constraint_tol must be positive");
  require(orthogonality_probes >= 1, ErrorCode::InvalidArgument, "need at least one orthogonality probe");
}

std::vector<double> FlowConfig::times() const { return fields::power_time_grid(T, frames, time_exponent); }

Nonlinearities nonlinearities(const GridField& u, const SphereTarget& target, TubeExitPolicy policy,
                              TubeReport* report) {
  target.validate();
  require(u.codomain_dim() == target.ambient_dim, ErrorCode::InvalidArgument,
          "field codomain does not match the target ambient dimension");
  const Grid& g = u.grid();
  const int n = g.dim, l = target.ambient_dim;
  const auto N = u.point_count();

  // tube check before any derivative work
  TubeReport local;
  std::vector<char> clamped(N, 0);
  {
    std::vector<double> y(l);
    for (std::size_t p = 0; p < N; ++p) {
      u.gather(p, y);
      const double d = manifold::sphere_distance(y);
      if (d <= target.tube_radius) continue;
      local.worst_distance = std::max(local.worst_distance, d);
      if (policy == TubeExitPolicy::Error) {
        std::ostringstream os;
        os << "value left the tube at x = " << location(g, p) << ": |u| = " << std::sqrt(manifold::dot(y, y))
           << ", tube radius " << target.tube_radius;
        fail(ErrorCode::ManifoldTubeExit, os.str());
      }
      clamped[p] = 1;
      ++local.clamped;
    }
  }

  const auto jet = frame_jet(u);
  Nonlinearities out{GridField(g, l), std::vector<GridField>(n, GridField(g, l)), GridField(g, l)};

  const std::size_t chunks = (N + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    std::vector<double> y(l), L(l), a(l), b(l), acc(l), V(l), W(l), X(l), Y(l), f3(l);
    std::vector<std::vector<double>> d(n, std::vector<double>(l)), Hrow(n, std::vector<double>(l));
    const std::size_t hi = std::min(N, (c + 1) * kChunk);
    for (std::size_t p = c * kChunk; p < hi; ++p) {
      u.gather(p, y);
      if (clamped[p]) clamp_to_tube(target, y);
      const auto j = manifold::projection_jet(target, y);
      jet.lap.gather(p, L);
      for (int i = 0; i < n; ++i) jet.grad[i].gather(p, d[i]);

      // F1 = -[<Δu, D^2P(Δu, .)> + sum_i <Δu, D^3P(∂_i u, ∂_i u, .)>]
      manifold::dpi2_adjoint(j, y, L, L, acc);
      for (int i = 0; i < n; ++i) {
        manifold::dpi3_adjoint(j, y, L, d[i], d[i], a);
        for (int k = 0; k < l; ++k) acc[k] += a[k];
      }
      for (int k = 0; k < l; ++k) out.F1(p, k) = -acc[k];

      // F2_al = 2 <Δu, D^2P(∂_al u, .)> + sum_i [D^3P(∂_al u, ∂_i u, ∂_i u) + 2 D^2P(∂_al ∂_i u, ∂_i u)]
      for (int al = 0; al < n; ++al) {
        manifold::dpi2_adjoint(j, y, L, d[al], acc);
        for (int k = 0; k < l; ++k) acc[k] *= 2.0;
        for (int i = 0; i < n; ++i) {
          jet.H(al, i).gather(p, Hrow[i]);
          manifold::dpi3(j, y, d[al], d[i], d[i], a);
          manifold::dpi2(j, y, Hrow[i], d[i], b);
          for (int k = 0; k < l; ++k) acc[k] += a[k] + 2.0 * b[k];
        }
        for (int k = 0; k < l; ++k) out.F2[al](p, k) = acc[k];
      }

      // F3 = DP[X] + 2 Y with V = sum_i D^2P(∂_i u, ∂_i u),
      // X = sum_i <V, D^3P(., ∂_i u, ∂_i u)>, Y = sum_i <V, D^2P(∂_i u, D^2P(∂_i u, .))>
      std::fill(V.begin(), V.end(), 0.0);
      for (int i = 0; i < n; ++i) {
        manifold::dpi2(j, y, d[i], d[i], a);
        for (int k = 0; k < l; ++k) V[k] += a[k];
      }
      std::fill(X.begin(), X.end(), 0.0);
      std::fill(Y.begin(), Y.end(), 0.0);
      for (int i = 0; i < n; ++i) {
        manifold::dpi3_adjoint(j, y, V, d[i], d[i], a);
        manifold::dpi2_adjoint(j, y, V, d[i], W);
        manifold::dpi2_adjoint(j, y, W, d[i], b);
        for (int k = 0; k < l; ++k) X[k] += a[k], Y[k] += b[k];
      }
      manifold::dpi1(j, y, X, f3);
      for (int k = 0; k < l; ++k) out.F3(p, k) = f3[k] + 2.0 * Y[k];
    }
  });

  if (report) {
    report->clamped += local.clamped;
    report->worst_distance = std::max(report->worst_distance, local.worst_distance);
  }
  return out;
}

GridField nonlinearity_F1(const GridField& u, const SphereTarget& target, TubeExitPolicy policy) {
  return nonlinearities(u, target, policy).F1;
}

std::vector<GridField> nonlinearity_F2(const GridField& u, const SphereTarget& target, TubeExitPolicy policy) {
  return nonlinearities(u, target, policy).F2;
}

GridField nonlinearity_F3(const GridField& u, const SphereTarget& target, TubeExitPolicy policy) {
  return nonlinearities(u, target, policy).F3;
}

ConstraintDiagnostics constraint_diagnostics(const SpaceTimeField& u, const SphereTarget& target,
                                             double constraint_tol, int probes, std::uint64_t seed) {
  u.validate();
  target.validate();
  require(u.codomain_dim() == target.ambient_dim, ErrorCode::InvalidArgument,
          "field codomain does not match the target ambient dimension");
  const int l = target.ambient_dim;
  const Grid& g = u.grid();
  const auto N = g.point_count();
  ConstraintDiagnostics c;
  c.times = u.times();
  c.sup_distance.resize(u.size());
  c.rho_mass.resize(u.size());
  c.orthogonality.resize(u.size());
  parallel_for(u.size(), [&](std::size_t m) {
    CounterRng rng(seed, m);
    std::vector<std::vector<double>> vs(probes, std::vector<double>(l));
    for (auto& v : vs)
      for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    std::vector<double> y(l), P(l), Q(l), w(l);
    double dist = 0.0, mass = 0.0, orth = 0.0;
    const auto& f = u.frame(m);
    for (std::size_t p = 0; p < N; ++p) {
      f.gather(p, y);
      dist = std::max(dist, manifold::sphere_distance(y));
      const auto jy = manifold::projection_jet(target, y);
      manifold::project(jy, y, P);
      for (int k = 0; k < l; ++k) Q[k] = y[k] - P[k];
      mass += 0.5 * manifold::dot(Q, Q);
      const auto jp = manifold::projection_jet(target, P);
      for (const auto& v : vs) {
        manifold::dpi1(jp, P, v, w);
        orth = std::max(orth, std::abs(manifold::dot(w, Q)));
      }
    }
    c.sup_distance[m] = dist;
    c.rho_mass[m] = mass * g.cell_volume();
    c.orthogonality[m] = orth;
  });
  for (std::size_t m = 0; m < u.size(); ++m) {
    c.max_rho_mass = std::max(c.max_rho_mass, c.rho_mass[m]);
    c.max_orthogonality = std::max(c.max_orthogonality, c.orthogonality[m]);
    c.max_distance = std::max(c.max_distance, c.sup_distance[m]);
  }
  c.constraint_flag = c.max_rho_mass > constraint_tol * g.volume();
  return c;
}

double FlowDiagnostics::max_ratio() const {
  double m = 0.0;
  for (double r : ratios) m = std::max(m, r);
  return m;
}

ContractionFailure::ContractionFailure(const std::string& message, std::shared_ptr<FlowResult> result)
    : Error(ErrorCode::ContractionFailure, message), result_(std::move(result)) {}

namespace {

// Duhamel map on spectra: G u0 spectra are precomputed once per run.
SpaceTimeField apply_map(const FlowConfig& config, const GridField& u0, const std::vector<Spectrum>& free,
                         const SpaceTimeField& u, TubeReport* report) {
  const auto& times = u.times();
  const Grid& g = u.grid();
  const int n = g.dim;
  std::vector<Spectrum> forcing;
  forcing.reserve(u.size());
  for (std::size_t m = 0; m < u.size(); ++m) {
    const auto F = nonlinearities(u.frame(m), config.target, config.tube_exit_policy, report);
    Spectrum f = spectral::forward(F.F1);
    std::vector<Spectrum> axes;
    for (int a = 0; a < n; ++a) axes.push_back(spectral::forward(F.F2[a]));
    const Spectrum div = semigroup::divergence_spectrum(axes);
    for (std::size_t i = 0; i < f.coefficients().size(); ++i) f.coefficients()[i] += div.coefficients()[i];
    if (config.mode == Mode::Intrinsic) {
      const Spectrum f3 = spectral::forward(F.F3);
      for (std::size_t i = 0; i < f.coefficients().size(); ++i) f.coefficients()[i] += f3.coefficients()[i];
    }
    forcing.push_back(std::move(f));
  }
  const auto S = semigroup::duhamel_spectra(times, forcing, times.size() - 1, config.scheme);
  std::vector<GridField> frames;
  frames.reserve(times.size());
  frames.push_back(u0);  // S_0 = 0 and G(0) = identity
  for (std::size_t m = 1; m < times.size(); ++m) {
    Spectrum s = free[m];
    for (std::size_t i = 0; i < s.coefficients().size(); ++i) s.coefficients()[i] += S[m].coefficients()[i];
    frames.push_back(spectral::inverse(s));
  }
  return SpaceTimeField(times, std::move(frames));
}

std::vector<Spectrum> free_spectra(const GridField& u0, const std::vector<double>& times) {
  const auto s0 = spectral::forward(u0);
  std::vector<Spectrum> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(semigroup::apply_G(s0, t));
  return out;
}

SpaceTimeField from_spectra(const GridField& u0, const std::vector<double>& times, const std::vector<Spectrum>& s) {
  std::vector<GridField> frames;
  frames.push_back(u0);
  for (std::size_t m = 1; m < times.size(); ++m) frames.push_back(spectral::inverse(s[m]));
  return SpaceTimeField(times, std::move(frames));
}

SpaceTimeField difference(const SpaceTimeField& a, const SpaceTimeField& b) {
  std::vector<GridField> frames;
  frames.reserve(a.size());
  for (std::size_t m = 0; m < a.size(); ++m) frames.push_back(a.frame(m) - b.frame(m));
  return SpaceTimeField(a.times(), std::move(frames));
}

void check_initial_data(const FlowConfig& config, const GridField& u0) {
  require(u0.grid() == config.grid, ErrorCode::InvalidArgument, "initial data grid differs from the config grid");
  require(u0.codomain_dim() == config.target.ambient_dim, ErrorCode::InvalidArgument,
          "initial data codomain does not match the target ambient dimension");
  std::vector<double> y(u0.codomain_dim());
  for (std::size_t p = 0; p < u0.point_count(); ++p) {
    u0.gather(p, y);
    if (manifold::sphere_distance(y) > 1e-10) {
      std::ostringstream os;
      os << "initial data is not sphere valued at x = " << location(u0.grid(), p)
         << ": |u0| = " << std::sqrt(manifold::dot(y, y));
      fail(ErrorCode::InvalidArgument, os.str());
    }
  }
}

}  // namespace

SpaceTimeField duhamel_map(const FlowConfig& config, const GridField& u0, const SpaceTimeField& u,
                           TubeReport* report) {
  config.validate();
  return apply_map(config, u0, free_spectra(u0, u.times()), u, report);
}

double fixed_point_residual(const FlowConfig& config, const GridField& u0, const SpaceTimeField& u) {
  const auto Tu = duhamel_map(config, u0, u);
  return norms::x_norm(difference(Tu, u), u.final_time(), config.norm_options).total;
}

FlowResult picard_solve(const FlowConfig& config, const GridField& u0) {
  config.validate();
  check_initial_data(config, u0);
  const auto times = config.times();
  const auto free = free_spectra(u0, times);

  auto result = std::make_shared<FlowResult>();
  auto& diag = result->diagnostics;
  SpaceTimeField current = from_spectra(u0, times, free);
  diag.iterate_norms.push_back(norms::x_norm(current, config.T, config.norm_options).total);

  int streak = 0;
  for (int k = 1; k <= config.max_picard_iters; ++k) {
    SpaceTimeField next;
    try {
      next = apply_map(config, u0, free, current, &diag.tube);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ManifoldTubeExit) throw;
      fail(ErrorCode::ManifoldTubeExit,
           "Picard iterate " + std::to_string(k - 1) + " left the tube (data too rough or box too small): " + e.what());
    }
    const double dk = norms::x_norm(difference(next, current), config.T, config.norm_options).total;
    diag.differences.push_back(dk);
    diag.iterate_norms.push_back(norms::x_norm(next, config.T, config.norm_options).total);
    diag.iterations = k;
    current = std::move(next);
    if (diag.differences.size() >= 2) {
      const double prev = diag.differences[diag.differences.size() - 2];
      const double theta = prev > 0.0 ? dk / prev : 0.0;
      diag.ratios.push_back(theta);
      streak = theta >= 1.0 ? streak + 1 : 0;
    }
    if (dk <= config.picard_tol) {
      diag.converged = true;
      diag.status = "converged";
      break;
    }
    if (streak >= 3) {
      diag.status = "contraction-failure";
      result->solution = current;
      diag.constraint = constraint_diagnostics(current, config.target, config.constraint_tol,
                                               config.orthogonality_probes, config.seed);
      std::ostringstream os;
      os << "Picard iteration is not contracting: theta >= 1 for three consecutive iterations (last theta "
         << diag.ratios.back() << ", d_" << k << " = " << dk << ")";
      throw ContractionFailure(os.str(), result);
    }
  }
  if (!diag.converged) diag.status = "max-iterations";
  diag.constraint = constraint_diagnostics(current, config.target, config.constraint_tol,
                                           config.orthogonality_probes, config.seed);
  result->solution = std::move(current);
  return std::move(*result);
}

GridField equator_map(const Grid& grid, int ambient_dim, double eps, int mode) {
  require(ambient_dim >= 2, ErrorCode::InvalidArgument, "the equator map needs an ambient dimension >= 2");
  const double k = 2.0 * std::numbers::pi * mode / grid.box_length;
  return fields::sample(grid, ambient_dim, [&](auto x, auto v) {
    const double s = eps * std::sin(k * x[0]);
    std::fill(v.begin(), v.end(), 0.0);
    v[0] = std::cos(s);
    v[1] = std::sin(s);
  });
}

GridField circle_map(const Grid& grid, int ambient_dim, int winding) {
  require(ambient_dim >= 2, ErrorCode::InvalidArgument, "the circle map needs an ambient dimension >= 2");
  const double k = 2.0 * std::numbers::pi * winding / grid.box_length;
  return fields::sample(grid, ambient_dim, [&](auto x, auto v) {
    std::fill(v.begin(), v.end(), 0.0);
    v[0] = std::cos(k * x[0]);
    v[1] = std::sin(k * x[0]);
  });
}

GridField constant_map(const Grid& grid, const std::vector<double>& point) {
  require(!point.empty(), ErrorCode::InvalidArgument, "constant map needs a point");
  return fields::sample(grid, static_cast<int>(point.size()),
                        [&](auto, auto v) { std::copy(point.begin(), point.end(), v.begin()); });
}

std::vector<SweepRow> contraction_sweep(const FlowConfig& config, const std::vector<double>& amplitudes) {
  config.validate();
  const double R = std::min(std::pow(config.T, 0.25), 0.5 * config.grid.box_length);
  std::vector<SweepRow> rows;
  for (double a : amplitudes) {
    SweepRow row;
    row.amplitude = a;
    const auto u0 = equator_map(config.grid, config.target.ambient_dim, a);
    row.bmo = norms::bmo_seminorm(u0, R);
    try {
      const auto res = picard_solve(config, u0);
      row.theta_max = res.diagnostics.max_ratio();
      row.converged = res.diagnostics.converged;
      row.iterations = res.diagnostics.iterations;
      row.status = res.diagnostics.status;
    } catch (const ContractionFailure& e) {
      row.theta_max = e.result().diagnostics.max_ratio();
      row.iterations = e.result().diagnostics.iterations;
      row.status = "contraction-failure";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ManifoldTubeExit) throw;
      row.status = "tube-exit";
    }
    rows.push_back(row);
  }
  return rows;
}

double distance_K(int dim, double tail_constant, double delta) {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "dimension must be 1, 2 or 3");
  require(delta > 0.0 && tail_constant > 0.0, ErrorCode::InvalidArgument, "delta and C_N must be positive");
  const double alpha = kernel::decay_rate();
  const double a = 0.75 * dim;
  // \int_K^inf e^{-alpha r^{4/3}} r^{n-1} dr = (3/4) alpha^{-3n/4} Gamma(3n/4, alpha K^{4/3})
  auto tail = [&](double K) {
    return tail_constant * 0.75 * std::pow(alpha, -a) * boost::math::tgamma(a, alpha * std::pow(K, 4.0 / 3.0));
  };
  double lo = 0.0, hi = 1.0;
  if (tail(lo) <= delta) return 0.0;
  while (tail(hi) > delta) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (tail(mid) > delta ? lo : hi) = mid;
  }
  return std::ceil(hi * 64.0) / 64.0;
}

DistanceReport distance_experiment(const GridField& u0, double R, double delta, int samples,
                                   const kernel::KernelProfile* profile) {
  const Grid& g = u0.grid();
  require(R > 0.0 && R <= 0.5 * g.box_length * (1.0 + 1e-12), ErrorCode::InvalidArgument,
          "distance radius R must lie in (0, L/2]");
  require(samples >= 2, ErrorCode::InvalidArgument, "need at least two time samples");
  const auto prof = profile ? *profile : kernel::KernelProfile::make(g.dim);
  DistanceReport r;
  r.delta = delta;
  r.R = R;
  r.kernel_constant = kernel::certify_bound(prof, kernel::Estimate::PointwiseGaussian, 0,
                                            kernel::default_samples(kernel::Estimate::PointwiseGaussian))
                          .fitted_constant;
  r.tail_constant = 2.0 * u0.sup_norm() * r.kernel_constant * sphere_area(g.dim);
  r.K = distance_K(g.dim, r.tail_constant, delta);
  const double Kn = std::pow(r.K, g.dim);
  const double t_max = std::pow(R / r.K, 4);
  std::vector<double> times{0.0};
  for (int i = samples - 1; i >= 0; --i) times.push_back(t_max * std::pow(10.0, -3.0 * i / (samples - 1)));
  const auto s0 = spectral::forward(u0);
  r.min_slack = std::numeric_limits<double>::infinity();
  for (double t : times) {
    DistanceRow row;
    row.t = t;
    const GridField ut = t == 0.0 ? u0 : spectral::inverse(semigroup::apply_G(s0, t));
    std::vector<double> y(ut.codomain_dim());
    for (std::size_t p = 0; p < ut.point_count(); ++p) {
      ut.gather(p, y);
      row.lhs = std::max(row.lhs, manifold::sphere_distance(y));
    }
    row.bmo_radius = r.K * std::pow(t, 0.25);
    if (t > 0.0) {
      if (row.bmo_radius <= 2.0 * g.spacing()) {
        ++r.skipped;
        continue;
      }
      row.bmo = norms::bmo_seminorm(u0, std::min(row.bmo_radius, 0.5 * g.box_length));
    }
    row.rhs = Kn * row.bmo + delta;
    r.min_slack = std::min(r.min_slack, row.rhs - row.lhs);
    if (row.lhs > row.rhs) r.holds = false;
    r.rows.push_back(row);
  }
  return r;
}

namespace {

struct DerivativeDensities {
  std::vector<double> grad2, hess2;
};

DerivativeDensities densities(const GridField& u) {
  const int n = u.grid().dim;
  const auto N = u.point_count();
  const auto j = frame_jet(u);
  DerivativeDensities d{std::vector<double>(N, 0.0), std::vector<double>(N, 0.0)};
  for (int a = 0; a < n; ++a) {
    for (int c = 0; c < u.codomain_dim(); ++c) {
      const auto comp = j.grad[a].component(c);
      for (std::size_t p = 0; p < N; ++p) d.grad2[p] += comp[p] * comp[p];
    }
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < u.codomain_dim(); ++c) {
        const auto comp = j.H(a, b).component(c);
        for (std::size_t p = 0; p < N; ++p) d.hess2[p] += comp[p] * comp[p];
      }
  }
  return d;
}

}  // namespace

HeatEstimateRow heat_estimates(const GridField& u0, double R, int frames, int scales) {
  const Grid& g = u0.grid();
  require(frames >= 3, ErrorCode::InvalidArgument, "need at least three frames");
  HeatEstimateRow row;
  row.R = R;
  row.bmo = norms::bmo_seminorm(u0, R);
  row.sup_norm = u0.sup_norm();
  const auto times = fields::power_time_grid(std::pow(R, 4), frames, 4.0);
  std::vector<double> radii;
  for (double r : norms::dyadic_radii(g, R)) {
    if (static_cast<int>(radii.size()) >= scales) break;
    const double tau = std::pow(r, 4);
    const auto inside = std::count_if(times.begin(), times.end(), [&](double t) { return t > 0.0 && t <= tau; });
    if (inside < 2) break;
    radii.push_back(r);
  }
  require(!radii.empty(), ErrorCode::ScaleUnresolvable, "no resolvable cylinder radius below R");

  const auto free = semigroup::free_evolution(u0, times);
  std::vector<DerivativeDensities> dens(times.size());
  for (std::size_t m = 0; m < times.size(); ++m) {
    dens[m] = densities(free.frame(m));
    if (times[m] == 0.0) continue;
    const double gsup = std::sqrt(*std::max_element(dens[m].grad2.begin(), dens[m].grad2.end()));
    const double hsup = std::sqrt(*std::max_element(dens[m].hess2.begin(), dens[m].hess2.end()));
    row.weighted_sup = std::max(row.weighted_sup, std::pow(times[m], 0.25) * gsup + std::sqrt(times[m]) * hsup);
  }
  const auto cyl = norms::cylinder_integrals(g, times, radii, 3, [&](std::size_t m) {
    std::vector<std::vector<double>> d{dens[m].grad2, dens[m].hess2, dens[m].grad2};
    for (auto& v : d[2]) v = v * v;
    return d;
  });
  for (std::size_t q = 0; q < radii.size(); ++q) {
    const double r = radii[q];
    const double w = 1.0 / std::pow(r, g.dim);
    for (std::size_t p = 0; p < g.point_count(); ++p) {
      row.cylinder = std::max(row.cylinder, w * (cyl[q][1][p] + cyl[q][0][p] / (r * r)));
      row.quartic = std::max(row.quartic, w * cyl[q][2][p]);
    }
  }
  return row;
}

nlohmann::json to_json(const ConstraintDiagnostics& c) {
  return {{"times", c.times},
          {"sup_distance", c.sup_distance},
          {"rho_mass", c.rho_mass},
          {"orthogonality", c.orthogonality},
          {"max_rho_mass", c.max_rho_mass},
          {"max_orthogonality", c.max_orthogonality},
          {"max_distance", c.max_distance},
          {"constraint_flag", c.constraint_flag}};
}

nlohmann::json to_json(const FlowDiagnostics& d) {
  return {{"iterate_norms", d.iterate_norms},
          {"differences", d.differences},
          {"ratios", d.ratios},
          {"theta_max", d.max_ratio()},
          {"converged", d.converged},
          {"iterations", d.iterations},
          {"status", d.status},
          {"tube_clamped", d.tube.clamped},
          {"tube_worst_distance", d.tube.worst_distance},
          {"constraint", to_json(d.constraint)}};
}

nlohmann::json to_json(const DistanceReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"t", row.t}, {"lhs", row.lhs}, {"bmo_radius", row.bmo_radius}, {"bmo", row.bmo},
                    {"rhs", row.rhs}});
  return {{"K", r.K},
          {"delta", r.delta},
          {"R", r.R},
          {"kernel_constant", r.kernel_constant},
          {"tail_constant", r.tail_constant},
          {"skipped", r.skipped},
          {"holds", r.holds},
          {"min_slack", r.min_slack},
          {"rows", rows}};
}

}  // namespace bihflow::flow
