#include "bihflow/manifold.hpp"

#include <cmath>

#include "bihflow/error.hpp"

namespace bihflow::manifold {

namespace {

// C^3 smoothstep S(s) = 35 s^4 - 84 s^5 + 70 s^6 - 20 s^7 and derivatives.
struct Step {
  double s0, s1, s2, s3;
};

Step smoothstep(double s) {
  const double s2 = s * s, s3 = s2 * s;
  return {s3 * s * (35.0 + s * (-84.0 + s * (70.0 - 20.0 * s))),
          s3 * (140.0 + s * (-420.0 + s * (420.0 - 140.0 * s))),
          s2 * (420.0 + s * (-1680.0 + s * (2100.0 - 840.0 * s))),
          s * (840.0 + s * (-5040.0 + s * (8400.0 - 4200.0 * s)))};
}

void check_dim(const SphereTarget& t, ConstVec y) {
  require(static_cast<int>(y.size()) == t.ambient_dim, ErrorCode::InvalidArgument,
          "vector length does not match the ambient dimension");
}

}  // namespace

void SphereTarget::validate() const {
  require(ambient_dim >= 2, ErrorCode::InvalidArgument, "ambient dimension must be >= 2");
  require(tube_radius > 0.0 && tube_radius <= 0.5, ErrorCode::InvalidArgument,
          "tube radius must lie in (0, 1/2]");
  require(blend_radius > 0.0 && blend_radius < 1.0 - tube_radius, ErrorCode::InvalidArgument,
          "blend radius must lie in (0, 1 - tube_radius)");
}

bool SphereTarget::in_tube(ConstVec y) const noexcept {
  return sphere_distance(y) <= tube_radius;
}

double dot(ConstVec a, ConstVec b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sphere_distance(ConstVec y) noexcept { return std::abs(std::sqrt(dot(y, y)) - 1.0); }

ProjectionJet projection_jet(const SphereTarget& target, ConstVec y) {
  ProjectionJet j;
  const double r = std::sqrt(dot(y, y));
  j.r = r;
  const double r1 = target.exact_radius();
  if (r >= r1) {
    const double ir = 1.0 / r, ir2 = ir * ir;
    j.phi = ir;
    j.d1 = -ir2 * ir;
    j.d2 = 3.0 * ir2 * ir2 * ir;
    j.d3 = -15.0 * ir2 * ir2 * ir2 * ir;
    return j;
  }
  const double c0 = 1.0 / r1;
  const double b = target.blend_radius;
  if (r <= b) {
    j.phi = c0;
    return j;
  }
  const double w = r1 - b;
  const auto S = smoothstep((r - b) / w);
  const double a0 = 1.0 / r - c0, a1 = -1.0 / (r * r), a2 = 2.0 / (r * r * r),
               a3 = -6.0 / (r * r * r * r);
  const double p1 = S.s1 * a0 / w + S.s0 * a1;
  const double p2 = S.s2 * a0 / (w * w) + 2.0 * S.s1 * a1 / w + S.s0 * a2;
  const double p3 = S.s3 * a0 / (w * w * w) + 3.0 * S.s2 * a1 / (w * w) + 3.0 * S.s1 * a2 / w +
                    S.s0 * a3;
  j.phi = c0 + S.s0 * a0;
  j.d1 = p1 / r;
  j.d2 = p2 / (r * r) - p1 / (r * r * r);
  j.d3 = p3 / (r * r * r) - 3.0 * p2 / (r * r * r * r) + 3.0 * p1 / (r * r * r * r * r);
  return j;
}

void project(const ProjectionJet& j, ConstVec y, Vec out) {
  for (std::size_t a = 0; a < y.size(); ++a) out[a] = j.phi * y[a];
}

void dpi1(const ProjectionJet& j, ConstVec y, ConstVec v, Vec out) {
  const double yv = dot(y, v) * j.d1;
  for (std::size_t a = 0; a < y.size(); ++a) out[a] = j.phi * v[a] + yv * y[a];
}

void dpi2(const ProjectionJet& j, ConstVec y, ConstVec v, ConstVec w, Vec out) {
  const double yv = dot(y, v), yw = dot(y, w), vw = dot(v, w);
  const double cy = vw * j.d1 + yv * yw * j.d2;
  for (std::size_t a = 0; a < y.size(); ++a)
    out[a] = (v[a] * yw + w[a] * yv) * j.d1 + cy * y[a];
}

void dpi3(const ProjectionJet& j, ConstVec y, ConstVec u, ConstVec v, ConstVec w, Vec out) {
  const double yu = dot(y, u), yv = dot(y, v), yw = dot(y, w);
  const double uv = dot(u, v), uw = dot(u, w), vw = dot(v, w);
  const double cu = vw * j.d1 + yv * yw * j.d2;
  const double cv = uw * j.d1 + yu * yw * j.d2;
  const double cw = uv * j.d1 + yu * yv * j.d2;
  const double cy = (vw * yu + uv * yw + uw * yv) * j.d2 + yu * yv * yw * j.d3;
  for (std::size_t a = 0; a < y.size(); ++a)
    out[a] = cu * u[a] + cv * v[a] + cw * w[a] + cy * y[a];
}

void dpi2_adjoint(const ProjectionJet& j, ConstVec y, ConstVec z, ConstVec w, Vec out) {
  const double yw = dot(y, w), zw = dot(z, w), zy = dot(z, y);
  const double cz = yw * j.d1;
  const double cw = zy * j.d1;
  const double cy = zw * j.d1 + zy * yw * j.d2;
  for (std::size_t a = 0; a < y.size(); ++a) out[a] = cz * z[a] + cw * w[a] + cy * y[a];
}

void dpi3_adjoint(const ProjectionJet& j, ConstVec y, ConstVec z, ConstVec v, ConstVec w,
                  Vec out) {
  const double zv = dot(z, v), zw = dot(z, w), vw = dot(v, w);
  const double zy = dot(z, y), yv = dot(y, v), yw = dot(y, w);
  const double cz = vw * j.d1 + yv * yw * j.d2;
  const double cv = zw * j.d1 + zy * yw * j.d2;
  const double cw = zv * j.d1 + zy * yv * j.d2;
  const double cy = (zv * yw + zw * yv + zy * vw) * j.d2 + zy * yv * yw * j.d3;
  for (std::size_t a = 0; a < y.size(); ++a)
    out[a] = cz * z[a] + cv * v[a] + cw * w[a] + cy * y[a];
}

std::vector<double> project(const SphereTarget& target, ConstVec y) {
  check_dim(target, y);
  std::vector<double> out(y.size());
  project(projection_jet(target, y), y, out);
  return out;
}

std::vector<double> dpi(const SphereTarget& target, ConstVec y, int order,
                        const std::vector<std::vector<double>>& vectors) {
  check_dim(target, y);
  if (order < 1 || order > 3) fail(ErrorCode::UnsupportedOrder, "dpi order must be 1, 2 or 3");
  require(static_cast<int>(vectors.size()) == order, ErrorCode::InvalidArgument,
          "dpi needs exactly `order` direction vectors");
  for (const auto& v : vectors) check_dim(target, v);
  const auto j = projection_jet(target, y);
  std::vector<double> out(y.size());
  switch (order) {
    case 1: dpi1(j, y, vectors[0], out); break;
    case 2: dpi2(j, y, vectors[0], vectors[1], out); break;
    default: dpi3(j, y, vectors[0], vectors[1], vectors[2], out); break;
  }
  return out;
}

std::vector<double> defect_Q(const SphereTarget& target, ConstVec y) {
  auto p = project(target, y);
  for (std::size_t a = 0; a < y.size(); ++a) p[a] = y[a] - p[a];
  return p;
}

double rho(const SphereTarget& target, ConstVec y) {
  const auto q = defect_Q(target, y);
  return 0.5 * dot(q, q);
}

}  // namespace bihflow::manifold
