#include "kdplan/search_space.hpp"

#include <Eigen/Geometry>
#include <cmath>

namespace kdplan {

double Ellipsoid::normalized_radius_sq(const Vec3& p) const {
  const Vec3 local = rotation.transpose() * (p - center);
  return local.cwiseQuotient(semi_axes).squaredNorm();
}

Mat3 rotation_between(const Vec3& z_axis, const Vec3& r) {
  const double rn = r.norm();
  if (!(rn >= kDegenerateSeparation)) return Mat3::Identity();

  const Vec3 a = z_axis.normalized();
  const Vec3 b = r / rn;
  const double c = a.dot(b);
  if (c >= 1.0 - 1e-12) return Mat3::Identity();

  if (c <= -1.0 + 1e-12) {
    // Half-turn about x when x is orthogonal to z_axis (the usual case);
    // otherwise about some axis orthogonal to z_axis.
    Vec3 axis = Vec3::UnitX();
    if (std::abs(a.dot(axis)) > 1e-9) axis = a.unitOrthogonal();
    return 2.0 * axis * axis.transpose() - Mat3::Identity();
  }

  // Rodrigues: R = I + [v] + [v]^2 / (1 + c), v = a x b.
  const Vec3 v = a.cross(b);
  Mat3 vx;
  vx << 0, -v.z(), v.y(),
        v.z(), 0, -v.x(),
        -v.y(), v.x(), 0;
  return Mat3::Identity() + vx + vx * vx / (1.0 + c);
}

Ellipsoid build_search_space(const Vec3& start, const Vec3& goal, const Aabb& bounds) {
  if (!start.allFinite() || !goal.allFinite())
    throw std::invalid_argument("search space endpoints must be finite");
  if (bounds.degenerate()) throw std::invalid_argument("search space bounds are degenerate");

  Ellipsoid e;
  e.center = 0.5 * (start + goal);
  const Vec3 diff = goal - start;
  e.semi_axes = diff.cwiseAbs().cwiseMax(kMinSemiAxis);
  e.rotation = rotation_between(Vec3::UnitZ(), diff);
  return e;
}

SampleSet generate_interior_points(const Ellipsoid& e, int n, const Aabb& bounds) {
  if (n < 1) throw std::invalid_argument("sample count parameter n must be >= 1");

  const Vec3& r = e.semi_axes;
  const double r_min = r.minCoeff();
  const double h = 2.0 * r_min / (2.0 * n + 1.0);
  const int n_i = static_cast<int>(std::floor(n * r.x() / r_min));
  const int n_j = static_cast<int>(std::floor(n * r.y() / r_min));
  const int n_k = static_cast<int>(std::floor(n * r.z() / r_min));

  SampleSet out;
  out.n = n;
  // Octant mirroring works on the lattice indices, so a sign flip on a zero
  // index is skipped instead of emitting a duplicate.
  for (int k = 0; k <= n_k; ++k) {
    for (int j = 0; j <= n_j; ++j) {
      for (int i = 0; i <= n_i; ++i) {
        const Vec3 base(i * h, j * h, k * h);
        if (base.cwiseQuotient(r).squaredNorm() > 1.0) continue;
        for (int octant = 0; octant < 8; ++octant) {
          const int sx = (octant & 1) ? -1 : 1;
          const int sy = (octant & 2) ? -1 : 1;
          const int sz = (octant & 4) ? -1 : 1;
          if ((sx < 0 && i == 0) || (sy < 0 && j == 0) || (sz < 0 && k == 0)) continue;
          const Vec3 local(sx * base.x(), sy * base.y(), sz * base.z());
          const Vec3 p = e.center + e.rotation * local;
          if (!bounds.contains(p)) continue;
          out.points.push_back(p);
        }
      }
    }
  }
  return out;
}

}  // namespace kdplan
