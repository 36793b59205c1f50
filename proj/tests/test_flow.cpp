#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bihflow/error.hpp"
#include "bihflow/flow.hpp"
#include "bihflow/manifold.hpp"
#include "bihflow/rng.hpp"

using namespace bihflow;
using namespace bihflow::fields;
using namespace bihflow::flow;
using std::numbers::pi;

namespace {

FlowConfig small_config() {
  FlowConfig c;
  c.grid = {1, 8.0, 64};
  c.frames = 33;
  c.picard_tol = 1e-10;
  return c;
}

// Centered second difference along axis 0, periodic.
GridField fd_second(const GridField& f) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  GridField out(g, f.codomain_dim());
  for (std::size_t p = 0; p < g.point_count(); ++p) {
    auto i = g.indices(p);
    auto ip = i, im = i;
    ip[0] += 1;
    im[0] -= 1;
    for (int c = 0; c < f.codomain_dim(); ++c)
      out(p, c) = (f(g.flat(ip), c) - 2 * f(p, c) + f(g.flat(im), c)) / (h * h);
  }
  return out;
}

// -<Δu, Δ(DP(u))> with both Laplacians by finite differences of the
// pointwise Jacobian DP(u(x)) assembled from dpi.
GridField fd_F1(const GridField& u, const manifold::SphereTarget& target) {
  const Grid& g = u.grid();
  const int l = u.codomain_dim();
  std::vector<GridField> cols;  // column b of DP(u): DP(u) e_b
  for (int b = 0; b < l; ++b) {
    GridField col(g, l);
    std::vector<double> y(l);
    for (std::size_t p = 0; p < g.point_count(); ++p) {
      u.gather(p, y);
      std::vector<double> e(l, 0.0);
      e[b] = 1.0;
      col.scatter(p, manifold::dpi(target, y, 1, {e}));
    }
    cols.push_back(fd_second(col));
  }
  const auto lap = fd_second(u);
  GridField out(g, l);
  for (std::size_t p = 0; p < g.point_count(); ++p)
    for (int b = 0; b < l; ++b) {
      double s = 0.0;
      for (int a = 0; a < l; ++a) s += lap(p, a) * cols[b](p, a);
      out(p, b) = -s;
    }
  return out;
}

}  // namespace

TEST_CASE("constant maps have vanishing nonlinearities") {
  manifold::SphereTarget t;
  for (int dim = 1; dim <= 2; ++dim) {
    Grid g{dim, 4.0, 16};
    const auto u = constant_map(g, {0.0, 0.6, 0.8});
    const auto F = nonlinearities(u, t);
    CHECK(F.F1.sup_norm() == 0.0);
    CHECK(F.F3.sup_norm() == 0.0);
    for (const auto& f : F.F2) CHECK(f.sup_norm() == 0.0);
  }
}

TEST_CASE("F1 matches the finite-difference chain-rule oracle at second order") {
  manifold::SphereTarget t;
  std::vector<double> err;
  for (int M : {64, 128}) {
    Grid g{1, 8.0, M};
    const auto u = equator_map(g, 3, 0.8);
    err.push_back((nonlinearity_F1(u, t) - fd_F1(u, t)).sup_norm());
  }
  CHECK(err[1] < 1e-3);
  CHECK(std::log2(err[0] / err[1]) >= 1.8);
}

TEST_CASE("great-circle map closed forms") {
  manifold::SphereTarget t;
  Grid g{1, 8.0, 64};
  const double k = 2 * pi / g.box_length;
  const auto u = circle_map(g, 3, 1);
  const auto F = nonlinearities(u, t);
  const auto tangent = sample(g, 3, [&](auto x, auto v) {
    v[0] = -std::sin(k * x[0]);
    v[1] = std::cos(k * x[0]);
    v[2] = 0.0;
  });
  const double k3 = k * k * k, k4 = k3 * k;
  CHECK((F.F2[0] - k3 * tangent).sup_norm() < 1e-12);
  CHECK((F.F1 - 2.0 * k4 * u).sup_norm() < 1e-12);
  // the quartic term is normal on great circles
  CHECK((F.F3 + 2.0 * k4 * u).sup_norm() < 1e-12);
  // stationarity of the extrinsic flow: F1 + ∂_x F2 = Δ^2 u = k^4 u
  const auto div = spectral::spectral_divergence(F.F2);
  CHECK((F.F1 + div - k4 * u).sup_norm() < 1e-10);
}

TEST_CASE("amplitude homogeneity of F2 and F3") {
  manifold::SphereTarget t;
  Grid g{1, 8.0, 64};
  auto degree = [&](auto&& norm, double eps) {
    return std::log2(norm(equator_map(g, 3, eps)) / norm(equator_map(g, 3, eps / 2)));
  };
  auto f2 = [&](const GridField& u) { return nonlinearity_F2(u, t)[0].sup_norm(); };
  auto f3 = [&](const GridField& u) { return nonlinearity_F3(u, t).sup_norm(); };
  const double d2 = degree(f2, 0.05);
  const bool integral = std::abs(d2 - 2.0) <= 0.1 || std::abs(d2 - 3.0) <= 0.15;
  CHECK(integral);
  const double r3 = f3(equator_map(g, 3, 0.05)) / f3(equator_map(g, 3, 0.025));
  CHECK(std::abs(r3 / 16.0 - 1.0) <= 0.05);
}

TEST_CASE("tube exit policies") {
  manifold::SphereTarget t;
  Grid g{1, 4.0, 16};
  auto u = constant_map(g, {0.0, 0.0, 1.0});
  u(5, 2) = 1.8;
  try {
    nonlinearities(u, t);
    FAIL("expected tube exit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ManifoldTubeExit);
    CHECK(std::string(e.what()).find("|u| = 1.8") != std::string::npos);
  }
  TubeReport rep;
  const auto F = nonlinearities(u, t, TubeExitPolicy::ClampAndFlag, &rep);
  CHECK(rep.clamped == 1);
  CHECK(rep.worst_distance == doctest::Approx(0.8));
  CHECK(F.F1.all_finite());
}

TEST_CASE("constant initial data is an exact fixed point") {
  auto c = small_config();
  for (auto mode : {Mode::Extrinsic, Mode::Intrinsic}) {
    c.mode = mode;
    const auto u0 = constant_map(c.grid, {0.6, 0.0, 0.8});
    const auto res = picard_solve(c, u0);
    CHECK(res.diagnostics.converged);
    CHECK(res.diagnostics.iterations == 1);
    CHECK(res.diagnostics.differences.at(0) == 0.0);
    for (const auto& f : res.solution.frames()) CHECK(f.values() == u0.values());
    CHECK(res.diagnostics.constraint.max_rho_mass == 0.0);
    CHECK(res.diagnostics.constraint.max_orthogonality == 0.0);
  }
}

TEST_CASE("initial data must be sphere valued") {
  auto c = small_config();
  CHECK_THROWS_AS(picard_solve(c, constant_map(c.grid, {0.0, 0.0, 1.1})), Error);
  c.picard_tol = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("small equator data contracts and stays on the sphere") {
  auto c = small_config();
  const auto u0 = equator_map(c.grid, 3, 0.05);
  const auto res = picard_solve(c, u0);
  const auto& d = res.diagnostics;
  CHECK(d.converged);
  CHECK(d.differences.back() <= c.picard_tol);
  CHECK(d.max_ratio() < 1.0);
  for (double v : d.differences) CHECK(v >= 0.0);
  CHECK(d.constraint.max_orthogonality <= 1e-12);
  CHECK(d.constraint.max_rho_mass <= 1e-6 * c.grid.volume());
  CHECK_FALSE(d.constraint.constraint_flag);
  CHECK(fixed_point_residual(c, u0, res.solution) <= 2 * c.picard_tol);
}

TEST_CASE("extrinsic and intrinsic equator runs differ at quartic order") {
  auto c = small_config();
  auto gap = [&](double eps) {
    c.mode = Mode::Extrinsic;
    const auto a = picard_solve(c, equator_map(c.grid, 3, eps)).solution;
    c.mode = Mode::Intrinsic;
    const auto b = picard_solve(c, equator_map(c.grid, 3, eps)).solution;
    return a.sup_distance(b);
  };
  const double g1 = gap(0.05), g2 = gap(0.025);
  CHECK(g1 < 1e-4);
  CHECK(std::log2(g1 / g2) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("flow self-similarity under x -> 2x, t -> 16t") {
  auto c = small_config();
  const auto ref = picard_solve(c, equator_map(c.grid, 3, 0.1));
  auto s = c;
  s.grid.box_length = c.grid.box_length / 2;
  s.T = c.T / 16;
  const auto scaled = picard_solve(s, equator_map(s.grid, 3, 0.1));
  REQUIRE(scaled.solution.size() == ref.solution.size());
  double worst = 0.0;
  for (std::size_t m = 0; m < ref.solution.size(); ++m) {
    CHECK(scaled.solution.times()[m] * 16 == ref.solution.times()[m]);
    worst = std::max(worst, (scaled.solution.frame(m) - ref.solution.frame(m)).sup_norm());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("distance estimate for free evolution") {
  Grid g{1, 8.0, 128};
  const auto c = distance_experiment(constant_map(g, {0.0, 1.0, 0.0}), 4.0, 0.05);
  for (const auto& r : c.rows) CHECK(r.lhs <= 1e-14);
  const auto r = distance_experiment(equator_map(g, 3, 0.2), 4.0, 0.05);
  CHECK(r.K > 1.0);
  CHECK(r.holds);
  CHECK(r.min_slack > 0.0);
  CHECK(r.rows.size() >= 2);
  const auto r2 = distance_experiment(equator_map(g, 3, 0.4), 4.0, 0.05);
  REQUIRE(r2.rows.size() == r.rows.size());
  for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r2.rows[i].lhs >= r.rows[i].lhs);
  CHECK(distance_K(1, 1.0, 1e-3) > distance_K(1, 1.0, 1e-2));
}

TEST_CASE("free evolution estimates relative to the BMO seminorm") {
  Grid g{1, 8.0, 128};
  const auto u0 = equator_map(g, 3, 0.3);
  const auto h = heat_estimates(u0, 2.0);
  CHECK(h.bmo > 0.0);
  CHECK(std::isfinite(h.cylinder / (h.bmo * h.bmo)));
  CHECK(std::isfinite(h.weighted_sup / h.bmo));
  CHECK(h.quartic > 0.0);
}

TEST_CASE("contraction sweep reports one row per amplitude") {
  auto c = small_config();
  c.frames = 17;
  const auto rows = contraction_sweep(c, {0.02, 0.05});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].bmo < rows[1].bmo);
  CHECK(rows[0].converged);
  CHECK(rows[0].theta_max <= rows[1].theta_max);
}
