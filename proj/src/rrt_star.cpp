#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "kdplan/planners.hpp"

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace kdplan {

std::string to_string(SamplerMode mode) {
  return mode == SamplerMode::EllipsoidSet ? "ellipsoid_set" : "uniform_box";
}

SamplerMode sampler_mode_from_string(const std::string& name) {
  if (name == "ellipsoid_set") return SamplerMode::EllipsoidSet;
  if (name == "uniform_box") return SamplerMode::UniformBox;
  throw ValidationError("sampler_mode", "expected ellipsoid_set or uniform_box, got '" + name + "'");
}

void PlannerConfig::validate() const {
  if (!(step > 0.0)) throw ValidationError("step", "must be > 0");
  if (!(rewire_radius > 0.0)) throw ValidationError("rewire_radius", "must be > 0");
  if (max_iterations < 1) throw ValidationError("max_iterations", "must be >= 1");
  if (!(goal_tolerance > 0.0)) throw ValidationError("goal_tolerance", "must be > 0");
  if (!(horizon > 0.0)) throw ValidationError("horizon", "must be > 0");
  if (!(d_safe >= 0.0)) throw ValidationError("d_safe", "must be >= 0");
  if (!(edge_clearance >= 0.0) || edge_clearance > d_safe)
    throw ValidationError("edge_clearance", "must be in [0, d_safe]");
  if (num_parallel < 1) throw ValidationError("num_parallel", "must be >= 1");
  if (sample_n < 1) throw ValidationError("sample_n", "must be >= 1");
  if (goal_bias_period < 1) throw ValidationError("goal_bias_period", "must be >= 1");
  if (!(collision_step > 0.0)) throw ValidationError("collision_step", "must be > 0");
  if (!(grid_res > 0.0)) throw ValidationError("grid_res", "must be > 0");
  if (bounds.degenerate()) throw ValidationError("bounds", "max must exceed min on every axis");
}

// ---------------------------------------------------------------------------
// Tree

struct Tree::Index {
  using BPoint = bg::model::point<double, 3, bg::cs::cartesian>;
  using Value = std::pair<BPoint, std::size_t>;
  bgi::rtree<Value, bgi::quadratic<16>> rtree;

  static BPoint to_b(const Vec3& p) { return BPoint(p.x(), p.y(), p.z()); }
};

Tree::Tree(const Vec3& root) : index_(std::make_unique<Index>()) {
  pos_.push_back(root);
  parent_.push_back(-1);
  cost_.push_back(0.0);
  children_.emplace_back();
  index_->rtree.insert({Index::to_b(root), 0});
}

Tree::~Tree() = default;

std::size_t Tree::add(const Vec3& p, std::size_t parent) {
  const std::size_t id = pos_.size();
  pos_.push_back(p);
  parent_.push_back(static_cast<std::ptrdiff_t>(parent));
  cost_.push_back(cost_[parent] + (p - pos_[parent]).norm());
  children_.emplace_back();
  children_[parent].push_back(id);
  index_->rtree.insert({Index::to_b(p), id});
  return id;
}

void Tree::reparent(std::size_t node, std::size_t new_parent) {
  const auto old = parent_[node];
  if (old >= 0) {
    auto& siblings = children_[static_cast<std::size_t>(old)];
    siblings.erase(std::find(siblings.begin(), siblings.end(), node));
  }
  parent_[node] = static_cast<std::ptrdiff_t>(new_parent);
  children_[new_parent].push_back(node);

  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const auto n = stack.back();
    stack.pop_back();
    const auto p = static_cast<std::size_t>(parent_[n]);
    cost_[n] = cost_[p] + (pos_[n] - pos_[p]).norm();
    for (auto c : children_[n]) stack.push_back(c);
  }
}

std::size_t Tree::nearest(const Vec3& p) const {
  std::vector<Index::Value> out;
  index_->rtree.query(bgi::nearest(Index::to_b(p), 1), std::back_inserter(out));
  return out.front().second;
}

std::vector<std::size_t> Tree::within(const Vec3& p, double radius) const {
  using Box = bg::model::box<Index::BPoint>;
  const Box box(Index::to_b(p - Vec3::Constant(radius)), Index::to_b(p + Vec3::Constant(radius)));
  std::vector<Index::Value> hits;
  index_->rtree.query(bgi::intersects(box), std::back_inserter(hits));
  std::vector<std::size_t> ids;
  for (const auto& h : hits)
    if ((pos_[h.second] - p).norm() <= radius) ids.push_back(h.second);
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<Vec3> Tree::path_to(std::size_t node) const {
  std::vector<Vec3> path;
  for (auto n = static_cast<std::ptrdiff_t>(node); n >= 0; n = parent_[static_cast<std::size_t>(n)])
    path.push_back(pos_[static_cast<std::size_t>(n)]);
  std::reverse(path.begin(), path.end());
  return path;
}

double Tree::audit() const {
  if (parent_.empty() || parent_[0] != -1) return kInf;
  double worst = 0.0;
  for (std::size_t i = 1; i < pos_.size(); ++i) {
    const auto p = parent_[i];
    if (p < 0 || static_cast<std::size_t>(p) >= pos_.size()) return kInf;
    // Walking up must reach the root within size() steps.
    std::size_t steps = 0;
    for (auto n = static_cast<std::ptrdiff_t>(i); n > 0; n = parent_[static_cast<std::size_t>(n)])
      if (++steps > pos_.size()) return kInf;
    const double expect = cost_[static_cast<std::size_t>(p)] +
                          (pos_[i] - pos_[static_cast<std::size_t>(p)]).norm();
    worst = std::max(worst, std::abs(cost_[i] - expect));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Path utilities

Vec3 steer(const Vec3& from, const Vec3& to, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("steer step must be > 0");
  const Vec3 d = to - from;
  const double len = d.norm();
  if (len <= step) return to;
  return from + (step / len) * d;
}

double path_length(std::span<const Vec3> waypoints) {
  double total = 0.0;
  for (std::size_t m = 0; m + 1 < waypoints.size(); ++m)
    total += (waypoints[m] - waypoints[m + 1]).norm();
  return total;
}

double path_cost(std::span<const Vec3> waypoints, const Vec3& goal) {
  if (waypoints.empty()) throw std::invalid_argument("path_cost needs at least one waypoint");
  return (waypoints.back() - goal).norm() + path_length(waypoints);
}

double path_min_clearance(const InstanceMap& map, std::span<const Vec3> waypoints,
                          double step) {
  if (waypoints.size() == 1) return map.signed_distance(waypoints.front());
  double best = kInf;
  for (std::size_t m = 0; m + 1 < waypoints.size(); ++m)
    best = std::min(best, segment_min_clearance(map, waypoints[m], waypoints[m + 1], step));
  return best;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 over (master, index)
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Search setup

Vec3 intermediate_goal(const Vec3& start, const Vec3& goal, const InstanceMap& map,
                       const PlannerConfig& cfg) {
  if (!(cfg.horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  const Vec3 d = goal - start;
  const double dist = d.norm();
  if (dist <= cfg.horizon) return goal;

  const Vec3 candidate = start + (cfg.horizon / dist) * d;
  if (map.signed_distance(candidate) >= cfg.d_safe) return candidate;

  const Ellipsoid e = build_search_space(start, candidate, cfg.bounds);
  const SampleSet samples = generate_interior_points(e, cfg.sample_n, cfg.bounds);
  const Vec3* best = nullptr;
  double best_d = kInf;
  for (const auto& s : samples.points) {
    const double dd = (s - candidate).norm();
    if (dd < best_d && map.signed_distance(s) >= cfg.d_safe) {
      best_d = dd;
      best = &s;
    }
  }
  if (!best) throw NoFreeIntermediateGoal("no free search-space sample near the horizon point");
  return *best;
}

SearchSetup prepare_search(const InstanceMap& map, const Vec3& start, const Vec3& goal,
                           const PlannerConfig& cfg) {
  cfg.validate();
  SearchSetup s;
  s.start = start;
  s.goal = intermediate_goal(start, goal, map, cfg);
  s.ellipsoid = build_search_space(start, s.goal, cfg.bounds);
  if (cfg.sampler_mode == SamplerMode::EllipsoidSet) {
    s.samples = std::make_shared<const SampleSet>(
        generate_interior_points(s.ellipsoid, cfg.sample_n, cfg.bounds));
  }
  return s;
}

// ---------------------------------------------------------------------------
// RRT*

namespace {

// Draws without replacement from a fixed point set; refills once exhausted.
class SetSampler {
 public:
  SetSampler(const SampleSet& set, std::mt19937_64& rng) : set_(set), rng_(rng) {
    order_.resize(set.points.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }

  Vec3 draw() {
    if (next_ == order_.size()) next_ = 0;
    std::uniform_int_distribution<std::size_t> pick(next_, order_.size() - 1);
    std::swap(order_[next_], order_[pick(rng_)]);
    return set_.points[order_[next_++]];
  }

 private:
  const SampleSet& set_;
  std::mt19937_64& rng_;
  std::vector<std::size_t> order_;
  std::size_t next_ = 0;
};

// Keeps waypoints while the cumulative length stays within the horizon.
std::vector<Vec3> truncate_to_horizon(std::vector<Vec3> path, double horizon) {
  double acc = 0.0;
  for (std::size_t m = 1; m < path.size(); ++m) {
    acc += (path[m] - path[m - 1]).norm();
    if (acc > horizon) {
      path.resize(m);
      break;
    }
  }
  return path;
}

}  // namespace

PathCandidate rrt_star_search(const InstanceMap& map, const SearchSetup& setup,
                              const PlannerConfig& cfg, const TreeObserver& observer) {
  const Vec3& start = setup.start;
  const Vec3& goal = setup.goal;
  if (map.signed_distance(start) < cfg.edge_clearance)
    throw PathNotFound("start is inside an inflated obstacle");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> bias(0, cfg.goal_bias_period - 1);
  std::uniform_real_distribution<double> ux(cfg.bounds.min.x(), cfg.bounds.max.x());
  std::uniform_real_distribution<double> uy(cfg.bounds.min.y(), cfg.bounds.max.y());
  std::uniform_real_distribution<double> uz(cfg.bounds.min.z(), cfg.bounds.max.z());

  const bool use_set = cfg.sampler_mode == SamplerMode::EllipsoidSet && setup.samples &&
                       !setup.samples->points.empty();
  std::optional<SetSampler> set_sampler;
  if (use_set) set_sampler.emplace(*setup.samples, rng);

  auto draw = [&]() -> Vec3 {
    if (bias(rng) == 0) return goal;
    if (use_set) return set_sampler->draw();
    const double x = ux(rng);
    const double y = uy(rng);
    const double z = uz(rng);
    return Vec3(x, y, z);
  };

  Tree tree(start);
  std::vector<std::size_t> goal_nodes;
  if ((start - goal).norm() <= cfg.goal_tolerance) goal_nodes.push_back(0);

  const auto edge_ok = [&](const Vec3& a, const Vec3& b) {
    return segment_clear(map, a, b, cfg.collision_step, cfg.edge_clearance);
  };

  int first_solution = goal_nodes.empty() ? -1 : 0;
  int it = 0;
  for (; it < cfg.max_iterations; ++it) {
    if (first_solution >= 0 && cfg.refine_iterations >= 0 &&
        it - first_solution >= cfg.refine_iterations)
      break;

    const Vec3 sample = draw();
    const std::size_t nearest = tree.nearest(sample);
    const Vec3 candidate = steer(tree.position(nearest), sample, cfg.step);
    if ((candidate - tree.position(nearest)).norm() < 1e-9) continue;
    if (!cfg.bounds.contains(candidate)) continue;
    if (!edge_ok(tree.position(nearest), candidate)) continue;

    // Parent = cheapest collision-free neighbor.
    const auto near = tree.within(candidate, cfg.rewire_radius);
    std::size_t parent = nearest;
    double parent_cost = tree.cost(nearest) + (candidate - tree.position(nearest)).norm();
    for (auto n : near) {
      if (n == nearest) continue;
      const double c = tree.cost(n) + (candidate - tree.position(n)).norm();
      if (c < parent_cost && edge_ok(tree.position(n), candidate)) {
        parent = n;
        parent_cost = c;
      }
    }
    const std::size_t id = tree.add(candidate, parent);

    for (auto n : near) {
      if (n == parent) continue;
      const double via = tree.cost(id) + (tree.position(n) - candidate).norm();
      if (via < tree.cost(n) - 1e-12 && edge_ok(candidate, tree.position(n)))
        tree.reparent(n, id);
    }

    if ((candidate - goal).norm() <= cfg.goal_tolerance) {
      goal_nodes.push_back(id);
      if (first_solution < 0) first_solution = it;
    }
    if (observer) observer(tree, it);
  }

  if (goal_nodes.empty())
    throw PathNotFound("RRT* did not reach the goal within " +
                       std::to_string(cfg.max_iterations) + " iterations");

  std::size_t best = goal_nodes.front();
  double best_cost = kInf;
  for (auto g : goal_nodes) {
    const double c = tree.cost(g) + (tree.position(g) - goal).norm();
    if (c < best_cost) {
      best_cost = c;
      best = g;
    }
  }

  std::vector<Vec3> path = tree.path_to(best);
  // Finish exactly on the goal when the last gap is collision-free.
  if ((path.back() - goal).norm() > 0.0 && edge_ok(path.back(), goal)) path.push_back(goal);

  PathCandidate out;
  out.waypoints = truncate_to_horizon(std::move(path), cfg.horizon);
  out.goal = goal;
  out.cost = path_cost(out.waypoints, goal);
  out.min_clearance = path_min_clearance(map, out.waypoints, cfg.collision_step);
  out.iterations = it;
  out.tree_size = tree.size();
  return out;
}

PathCandidate plan_rrt_star(const InstanceMap& map, const Vec3& start, const Vec3& goal,
                            const PlannerConfig& cfg) {
  return rrt_star_search(map, prepare_search(map, start, goal, cfg), cfg);
}

}  // namespace kdplan
