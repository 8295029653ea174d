#pragma once

#include <vector>

#include "kdplan/types.hpp"

namespace kdplan {

// Smallest semi-axis the adaptive search space is allowed to shrink to (m).
inline constexpr double kMinSemiAxis = 4.0;

// Start/goal separations below this take the identity-rotation branch.
inline constexpr double kDegenerateSeparation = 1e-6;

struct Ellipsoid {
  Vec3 center = Vec3::Zero();
  Vec3 semi_axes = Vec3::Constant(kMinSemiAxis);
  Mat3 rotation = Mat3::Identity();

  // Left-hand side of the ellipsoid equation, evaluated in the body frame
  // (after undoing the rotation about the center). <= 1 means inside.
  double normalized_radius_sq(const Vec3& p) const;
  bool contains(const Vec3& p, double tol = 1e-9) const {
    return normalized_radius_sq(p) <= 1.0 + tol;
  }
};

struct SampleSet {
  std::vector<Vec3> points;
  int n = 0;
};

// Rotation taking `z_axis` onto the direction of `r`. Identity when r is
// (near-)zero or parallel to z_axis; a fixed half-turn when antiparallel.
Mat3 rotation_between(const Vec3& z_axis, const Vec3& r);

// Adaptive search space for a start/goal pair: centered midway, semi-axes
// |goal - start| per component clamped from below to kMinSemiAxis, oriented
// so the body z-axis points from start to goal.
Ellipsoid build_search_space(const Vec3& start, const Vec3& goal, const Aabb& bounds);

// Deterministic interior lattice. The lattice step comes from the smallest
// semi-axis, the per-axis counts from the semi-axis ratios; the non-negative
// octant is mirrored into all eight, rotated about the center, and filtered
// to points inside both the ellipsoid and `bounds`.
SampleSet generate_interior_points(const Ellipsoid& e, int n, const Aabb& bounds);

}  // namespace kdplan
