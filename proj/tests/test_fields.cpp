#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bihflow/error.hpp"
#include "bihflow/fields.hpp"
#include "bihflow/norms.hpp"
#include "bihflow/rng.hpp"
#include "bihflow/semigroup.hpp"
#include "bihflow/spectral.hpp"

using namespace bihflow;
using namespace bihflow::fields;
using namespace bihflow::norms;
using std::numbers::pi;

namespace {

GridField sine(const Grid& g, double amplitude, int mode = 1) {
  return sample(g, 1, [&](auto x, auto v) { v[0] = amplitude * std::sin(2 * pi * mode * x[0] / g.box_length); });
}

GridField random_band_limited(const Grid& g, int l, std::uint64_t seed, int max_mode = 4) {
  CounterRng rng(seed);
  std::vector<std::array<double, 5>> terms;
  for (int i = 0; i < 6; ++i)
    terms.push_back({double(rng.integer(-max_mode, max_mode)), double(rng.integer(-max_mode, max_mode)),
                     rng.uniform(-1, 1), rng.uniform(0, 2 * pi), double(rng.integer(0, l - 1))});
  return sample(g, l, [&](auto x, auto v) {
    for (int c = 0; c < l; ++c) v[c] = 0.0;
    for (const auto& t : terms) {
      double ph = t[3] + 2 * pi * t[0] * x[0] / g.box_length;
      if (g.dim > 1) ph += 2 * pi * t[1] * x[1] / g.box_length;
      v[static_cast<int>(t[4])] += t[2] * std::cos(ph);
    }
  });
}

double max_abs_diff(const GridField& a, const GridField& b) { return (a - b).sup_norm(); }

SpaceTimeField constant_in_time(const GridField& f, const std::vector<double>& times) {
  return SpaceTimeField(times, std::vector<GridField>(times.size(), f));
}

}  // namespace

TEST_CASE("grid validation and indexing") {
  CHECK_THROWS_AS((Grid{1, 1.0, 12}.validate()), Error);
  CHECK_THROWS_AS((Grid{1, 1.0, 8}.validate()), Error);
  Grid g{2, 4.0, 16};
  g.validate();
  for (std::size_t p : {0ul, 17ul, 255ul}) CHECK(g.flat(g.indices(p)) == p);
  CHECK(g.frequency(8) == -8);
  CHECK(g.frequency(7) == 7);
  CHECK(g.cell_volume() == doctest::Approx(1.0 / 16));
}

TEST_CASE("space-time field validation") {
  Grid g{1, 1.0, 16};
  GridField f(g, 1);
  CHECK_THROWS_AS(SpaceTimeField({0.1, 0.2}, {f, f}), Error);
  CHECK_THROWS_AS(SpaceTimeField({0.0, 0.0}, {f, f}), Error);
  SpaceTimeField s({0.0, 0.5}, {f, f});
  CHECK(s.index_of(0.5) == 1);
  try {
    s.index_of(0.3);
    FAIL("expected time-misaligned");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TimeMisaligned);
  }
  const auto t = power_time_grid(1.0, 5);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == 1.0);
  CHECK(t[2] == doctest::Approx(1.0 / 16));
}

TEST_CASE("spectral derivative examples") {
  Grid g{1, 3.0, 32};
  GridField c = sample(g, 1, [](auto, auto v) { v[0] = 2.5; });
  for (int k = 1; k <= 4; ++k) CHECK(spectral::spectral_derivative(c, {k, 0, 0}).sup_norm() == 0.0);
  const auto s = sine(g, 1.0);
  const auto d2 = spectral::spectral_derivative(s, {2, 0, 0});
  const double k = 2 * pi / g.box_length;
  CHECK(max_abs_diff(d2, (-k * k) * s) < 1e-12 * k * k);
  CHECK_THROWS_AS(spectral::spectral_derivative(s, {5, 0, 0}), Error);

  Grid g2{2, 2.0, 32};
  const auto r = random_band_limited(g2, 2, 1);
  const auto a = spectral::spectral_derivative(spectral::spectral_derivative(r, {1, 0, 0}), {0, 1, 0});
  const auto b = spectral::spectral_derivative(spectral::spectral_derivative(r, {0, 1, 0}), {1, 0, 0});
  CHECK(max_abs_diff(a, b) < 1e-12);
  CHECK(max_abs_diff(a, spectral::spectral_derivative(r, {1, 1, 0})) < 1e-11);
}

TEST_CASE("ball sums match direct counting") {
  Grid g{2, 1.0, 16};
  std::vector<double> one(g.point_count(), 1.0);
  const auto sums = spectral::ball_sum(g, one, 0.25);
  const double count = static_cast<double>(spectral::ball_count(g, 0.25));
  for (double s : sums) CHECK(s == doctest::Approx(count));
  // a ball wider than the box counts every lattice point once
  CHECK(spectral::ball_count(g, 0.5) <= g.point_count());
}

TEST_CASE("BMO seminorm properties") {
  Grid g{1, 8.0, 128};
  GridField c = sample(g, 1, [](auto, auto v) { v[0] = 3.0; });
  CHECK(bmo_seminorm(c, 2.0) < 1e-13);
  const auto s = sine(g, 0.7);
  const double b = bmo_seminorm(s, 2.0);
  GridField shifted = s;
  for (auto& v : shifted.values()) v += 5.0;
  CHECK(bmo_seminorm(shifted, 2.0) == doctest::Approx(b).epsilon(1e-10));
  CHECK(bmo_seminorm(2.0 * s, 2.0) == doctest::Approx(2 * b).epsilon(1e-12));
  // nondecreasing in R
  CHECK(bmo_seminorm(s, 0.5) <= bmo_seminorm(s, 1.0) + 1e-15);
  CHECK(bmo_seminorm(s, 1.0) <= b + 1e-15);
  // brute-force oracle over all radii
  const double brute = bmo_bruteforce(s, 2.0);
  CHECK(brute >= b - 1e-14);
  CHECK(b >= brute / 1.15);
  try {
    bmo_seminorm(s, 2 * g.spacing());
    FAIL("expected scale-unresolvable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ScaleUnresolvable);
  }
  // triangle inequality on a random pair
  const auto u = random_band_limited(g, 1, 3), w = random_band_limited(g, 1, 4);
  CHECK(bmo_seminorm(u + w, 1.0) <= bmo_seminorm(u, 1.0) + bmo_seminorm(w, 1.0) + 1e-12);
}

TEST_CASE("Carleson functional properties") {
  Grid g{1, 8.0, 128};
  const auto profile = kernel::KernelProfile::make(1);
  GridField c = sample(g, 1, [](auto, auto v) { v[0] = 1.5; });
  CHECK(carleson_functional(c, profile, 1, 2.0) < 1e-20);
  const auto s = sine(g, 1.0, 2);
  for (int i = 1; i <= 2; ++i) {
    const double a = carleson_functional(s, profile, i, 2.0);
    CHECK(a > 0.0);
    CHECK(carleson_functional(2.0 * s, profile, i, 2.0) == doctest::Approx(4 * a).epsilon(1e-10));
  }
  CHECK_THROWS_AS(carleson_functional(s, profile, 3, 2.0), Error);
}

TEST_CASE("X norm of constants and of free evolutions") {
  Grid g{1, 8.0, 128};
  const auto times = power_time_grid(1.0, 33);
  GridField c = sample(g, 3, [](auto, auto v) { v[0] = 0.0; v[1] = 0.6; v[2] = 0.8; });
  const auto rc = x_norm(constant_in_time(c, times), 1.0);
  CHECK(rc.sup_part == doctest::Approx(1.0));
  CHECK(rc.seminorm_part < 1e-12);

  auto evolve = [&](const Grid& grid, double eps, const std::vector<double>& ts) {
    const auto u0 = sine(grid, eps);
    std::vector<GridField> frames;
    for (double t : ts) frames.push_back(semigroup::apply_G(u0, t));
    return SpaceTimeField(ts, frames);
  };
  const auto r1 = x_norm(evolve(g, 0.1, times), 1.0);
  const auto r2 = x_norm(evolve(g, 0.2, times), 1.0);
  CHECK(r1.seminorm_part > 0.0);
  CHECK(r2.seminorm_part == doctest::Approx(2 * r1.seminorm_part).epsilon(1e-10));
  Grid fine{1, 8.0, 256};
  const auto rf = x_norm(evolve(fine, 0.1, power_time_grid(1.0, 65)), 1.0);
  CHECK(std::abs(rf.seminorm_part / r1.seminorm_part - 1.0) <= 0.10);
  CHECK(std::abs(rf.total / r1.total - 1.0) <= 0.10);
  // triangle inequality
  const auto uv = evolve(g, 0.1, times);
  SpaceTimeField sum = uv;
  const auto other = constant_in_time(random_band_limited(g, 1, 8), times);
  for (std::size_t m = 0; m < sum.size(); ++m) sum.frame(m) += other.frame(m);
  CHECK(x_norm(sum, 1.0).total <= x_norm(uv, 1.0).total + x_norm(other, 1.0).total + 1e-12);
}

TEST_CASE("Y norms closed forms and homogeneity") {
  Grid g{1, 8.0, 128};
  const auto times = power_time_grid(1.0, 33);
  GridField zero(g, 1);
  CHECK(y1_norm(constant_in_time(zero, times), 1.0).total == 0.0);
  const double c = 0.3;
  GridField k = sample(g, 1, [&](auto, auto v) { v[0] = c; });
  const auto r = y1_norm(constant_in_time(k, times), 1.0);
  CHECK(r.sup_part == doctest::Approx(c * 1.0));
  // cylinder part: c r^4 (lattice ball volume) / r^n at r = T^{1/4} = 1
  const double ball = spectral::ball_count(g, 1.0) * g.cell_volume();
  CHECK(r.seminorm_part == doctest::Approx(c * ball).epsilon(1e-12));
  const auto f = constant_in_time(random_band_limited(g, 2, 5), times);
  SpaceTimeField f3 = f;
  for (auto& fr : f3.frames()) fr *= 3.0;
  CHECK(y1_norm(f3, 1.0).total == doctest::Approx(3 * y1_norm(f, 1.0).total).epsilon(1e-12));
  CHECK(y2_norm(f3, 1.0).total == doctest::Approx(3 * y2_norm(f, 1.0).total).epsilon(1e-12));
  const auto y2 = y2_norm(constant_in_time(k, times), 1.0);
  CHECK(y2.sup_part == doctest::Approx(c));
  CHECK(y2.seminorm_part == doctest::Approx(c * std::pow(ball, 0.75)).epsilon(1e-12));
}

TEST_CASE("norm scale resolution errors") {
  Grid g{1, 8.0, 128};
  GridField f(g, 1);
  // only t = 0 and t = 1: the smallest cylinder [0, r^4] holds no positive frame
  SpaceTimeField coarse({0.0, 1.0}, {f, f});
  try {
    x_norm(coarse, 1.0);
    FAIL("expected scale-unresolvable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ScaleUnresolvable);
  }
}
