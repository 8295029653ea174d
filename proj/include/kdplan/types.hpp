#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace kdplan {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Axis-aligned box, inclusive on both ends.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  Vec3 center() const { return 0.5 * (min + max); }
  Vec3 extent() const { return max - min; }
  bool degenerate() const { return !((max.array() > min.array()).all()); }
};

// Error types. Each carries a human-readable reason; callers that map errors
// to exit codes dispatch on the dynamic type.
struct PathNotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoFreeIntermediateGoal : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AllPlannersFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RiccatiFailure : std::runtime_error {
  RiccatiFailure(const std::string& what, int segment = -1)
      : std::runtime_error(what), segment_index(segment) {}
  int segment_index;
};
struct OutOfDomain : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
  ValidationError(const std::string& key_name, const std::string& why)
      : std::runtime_error(key_name + ": " + why), key(key_name) {}
  std::string key;
};

}  // namespace kdplan
