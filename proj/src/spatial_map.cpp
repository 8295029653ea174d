#include "kdplan/spatial_map.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace kdplan {

InstanceMap::InstanceMap(const PointCloud& cloud, const Vec3& center,
                         double radius, double inflation)
    : center_(center), radius_(radius), inflation_(inflation) {
  if (!(radius > 0.0)) throw std::invalid_argument("instance map radius must be > 0");
  if (!(inflation >= 0.0)) throw std::invalid_argument("inflation must be >= 0");

  std::vector<BPoint> boxed;
  for (const auto& p : cloud.points) {
    if ((p - center).norm() <= radius) {
      points_.push_back(p);
      boxed.emplace_back(p.x(), p.y(), p.z());
    }
  }
  // Packing constructor: bulk-loaded tree, independent of later inserts.
  tree_ = Tree(boxed.begin(), boxed.end());
}

std::optional<Vec3> InstanceMap::nearest(const Vec3& p) const {
  if (points_.empty()) return std::nullopt;
  std::vector<BPoint> out;
  tree_.query(bgi::nearest(BPoint(p.x(), p.y(), p.z()), 1), std::back_inserter(out));
  const auto& q = out.front();
  return Vec3(bg::get<0>(q), bg::get<1>(q), bg::get<2>(q));
}

double InstanceMap::signed_distance(const Vec3& p) const {
  const auto q = nearest(p);
  if (!q) return kInf;
  return (p - *q).norm() - inflation_;
}

void InstanceMap::for_each_within(
    const Vec3& p, double dist,
    const std::function<void(const Vec3&, double)>& fn) const {
  if (points_.empty() || !(dist >= 0.0)) return;
  const bg::model::box<BPoint> box(BPoint(p.x() - dist, p.y() - dist, p.z() - dist),
                                   BPoint(p.x() + dist, p.y() + dist, p.z() + dist));
  std::vector<BPoint> hits;
  tree_.query(bgi::intersects(box), std::back_inserter(hits));
  // R-tree output order depends on node layout; sort for a stable summation order.
  std::vector<std::pair<double, Vec3>> within;
  for (const auto& h : hits) {
    const Vec3 q(bg::get<0>(h), bg::get<1>(h), bg::get<2>(h));
    const double d = (p - q).norm();
    if (d <= dist) within.emplace_back(d, q);
  }
  std::sort(within.begin(), within.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return std::lexicographical_compare(a.second.data(), a.second.data() + 3,
                                        b.second.data(), b.second.data() + 3);
  });
  for (const auto& [d, q] : within) fn(q, d);
}

InstanceMap build_instance_map(const PointCloud& cloud, const Vec3& center,
                               double radius, double inflation) {
  return InstanceMap(cloud, center, radius, inflation);
}

namespace {

template <typename Fn>
void for_each_sample(const Vec3& a, const Vec3& b, double step, Fn&& fn) {
  if (!(step > 0.0)) throw std::invalid_argument("segment step must be > 0");
  const double len = (b - a).norm();
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    if (!fn(a + t * (b - a))) return;
  }
}

}  // namespace

bool segment_clear(const InstanceMap& map, const Vec3& a, const Vec3& b,
                   double step, double clearance) {
  if (map.empty()) return true;
  bool clear = true;
  for_each_sample(a, b, step, [&](const Vec3& p) {
    clear = map.signed_distance(p) >= clearance;
    return clear;
  });
  return clear;
}

double segment_min_clearance(const InstanceMap& map, const Vec3& a,
                             const Vec3& b, double step) {
  if (map.empty()) return kInf;
  double best = kInf;
  for_each_sample(a, b, step, [&](const Vec3& p) {
    best = std::min(best, map.signed_distance(p));
    return true;
  });
  return best;
}

PointCloud random_world(const WorldSpec& spec) {
  if (spec.n_obstacles < 0) throw std::invalid_argument("n_obstacles must be >= 0");
  if (!(spec.cube_size > 0.0)) throw std::invalid_argument("cube_size must be > 0");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> coord(0.0, spec.cube_size);

  // Unit Fibonacci sphere, shared by every obstacle.
  std::vector<Vec3> shell;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < kObstacleShellPoints; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / kObstacleShellPoints;
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    shell.emplace_back(rxy * std::cos(phi), rxy * std::sin(phi), z);
  }

  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(spec.n_obstacles) * (shell.size() + 1));
  for (int k = 0; k < spec.n_obstacles; ++k) {
    const double x = coord(rng);
    const double y = coord(rng);
    const double z = coord(rng);
    const Vec3 c(x, y, z);
    cloud.points.push_back(c);
    for (const auto& s : shell) cloud.points.push_back(c + spec.obstacle_radius * s);
  }
  return cloud;
}

MapBuffer::MapBuffer() : previous_(std::make_shared<const InstanceMap>()) {}

std::shared_ptr<const InstanceMap> MapBuffer::snapshot() const {
  std::lock_guard lock(mutex_);
  return previous_;
}

void MapBuffer::stage(InstanceMap next) {
  auto staged = std::make_shared<InstanceMap>(std::move(next));
  std::lock_guard lock(mutex_);
  current_ = std::move(staged);
}

void MapBuffer::publish() {
  std::lock_guard lock(mutex_);
  if (!current_) return;
  current_->set_generation(next_generation_++);
  previous_ = std::move(current_);
  current_.reset();
}

std::uint64_t MapBuffer::rebuild(const PointCloud& cloud, const Vec3& center,
                                 double radius, double inflation) {
  stage(build_instance_map(cloud, center, radius, inflation));
  publish();
  return generation();
}

std::uint64_t MapBuffer::generation() const {
  std::lock_guard lock(mutex_);
  return previous_->generation();
}

}  // namespace kdplan
