#pragma once

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "kdplan/types.hpp"

namespace kdplan {

struct PointCloud {
  std::vector<Vec3> points;
};

// Instance map: an R-tree over the occupied points that lie within `radius`
// of `center`. Immutable once built, so a single instance can be shared by
// any number of concurrent readers.
class InstanceMap {
 public:
  InstanceMap() = default;
  InstanceMap(const PointCloud& cloud, const Vec3& center, double radius,
              double inflation);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Vec3& center() const { return center_; }
  double radius() const { return radius_; }
  double inflation() const { return inflation_; }
  const std::vector<Vec3>& points() const { return points_; }

  // Snapshot identifier assigned by MapBuffer; 0 for maps built directly.
  std::uint64_t generation() const { return generation_; }
  void set_generation(std::uint64_t g) { generation_ = g; }

  std::optional<Vec3> nearest(const Vec3& p) const;

  // Distance to the nearest indexed point minus inflation; +inf when empty.
  double signed_distance(const Vec3& p) const;

  // Calls fn(point, euclidean_distance) for each indexed point q with
  // |p - q| <= dist.
  void for_each_within(const Vec3& p, double dist,
                       const std::function<void(const Vec3&, double)>& fn) const;

 private:
  using BPoint = boost::geometry::model::point<double, 3, boost::geometry::cs::cartesian>;
  using Tree = boost::geometry::index::rtree<BPoint, boost::geometry::index::rstar<16>>;

  Tree tree_;
  std::vector<Vec3> points_;
  Vec3 center_ = Vec3::Zero();
  double radius_ = kInf;
  double inflation_ = 0.0;
  std::uint64_t generation_ = 0;
};

InstanceMap build_instance_map(const PointCloud& cloud, const Vec3& center,
                               double radius, double inflation);

inline double signed_distance(const InstanceMap& map, const Vec3& p) {
  return map.signed_distance(p);
}

// True iff every sample along [a, b] (spacing <= step, endpoints included)
// has signed distance >= clearance.
bool segment_clear(const InstanceMap& map, const Vec3& a, const Vec3& b,
                   double step, double clearance);

// Minimum signed distance over samples along [a, b] with spacing <= step.
double segment_min_clearance(const InstanceMap& map, const Vec3& a,
                             const Vec3& b, double step);

struct WorldSpec {
  int n_obstacles = 50;
  double cube_size = 20.0;
  double obstacle_radius = 0.5;
  std::uint64_t seed = 0;
};

// Number of points emitted per obstacle by random_world (center + shell).
inline constexpr int kObstacleShellPoints = 48;

// Obstacle centers uniform in [0, cube_size]^3, each emitted as its center
// plus a Fibonacci shell of radius obstacle_radius. Deterministic per seed.
PointCloud random_world(const WorldSpec& spec);

// Double-buffered instance map. Readers take a snapshot of `previous`; a
// writer builds the next map off to the side and publishes it with a single
// pointer swap. A snapshot stays valid (and unchanged) for as long as the
// reader holds it.
class MapBuffer {
 public:
  MapBuffer();

  std::shared_ptr<const InstanceMap> snapshot() const;

  // Installs `next` as the map under construction. Not visible to readers
  // until publish().
  void stage(InstanceMap next);
  // Promotes the staged map; no-op when nothing is staged.
  void publish();

  // Convenience: build, stage and publish in one call. Returns the new
  // snapshot's generation.
  std::uint64_t rebuild(const PointCloud& cloud, const Vec3& center,
                        double radius, double inflation);

  std::uint64_t generation() const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const InstanceMap> previous_;
  std::shared_ptr<InstanceMap> current_;
  std::uint64_t next_generation_ = 1;
};

}  // namespace kdplan
