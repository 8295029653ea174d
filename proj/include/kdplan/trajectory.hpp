#pragma once

#include <span>
#include <vector>

#include "kdplan/types.hpp"

namespace kdplan {

struct TrajectorySample {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();
};

// Clamped cubic B-spline over [0, duration]. Knots live in the normalized
// parameter u = t / duration in [0, 1].
class BSpline {
 public:
  static constexpr int kDegree = 3;

  BSpline() = default;
  BSpline(std::vector<Vec3> control_points, std::vector<double> knots, double duration);

  const std::vector<Vec3>& control_points() const { return ctrl_; }
  const std::vector<double>& knots() const { return knots_; }
  double duration() const { return duration_; }
  int degree() const { return kDegree; }

  // Throws OutOfDomain for t outside [0, duration].
  TrajectorySample sample(double t) const;
  Vec3 position(double t) const { return sample(t).position; }

  // Interior knot times (distinct, strictly inside the domain) in seconds.
  std::vector<double> interior_knot_times() const;

 private:
  std::vector<Vec3> ctrl_;
  std::vector<double> knots_;
  double duration_ = 0.0;
  // Derivative splines on the trimmed knot vectors, in parameter units.
  std::vector<Vec3> d1_, d2_;
  std::vector<double> k1_, k2_;
};

// Control points = waypoints (endpoint-padded to at least four), uniform
// interior knots, duration = polyline length / speed.
BSpline fit_bspline(std::span<const Vec3> waypoints, double speed);

inline TrajectorySample sample(const BSpline& s, double t) { return s.sample(t); }

}  // namespace kdplan
