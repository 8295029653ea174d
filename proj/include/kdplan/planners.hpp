#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kdplan/search_space.hpp"
#include "kdplan/spatial_map.hpp"
#include "kdplan/types.hpp"

namespace kdplan {

enum class SamplerMode { EllipsoidSet, UniformBox };

std::string to_string(SamplerMode mode);
SamplerMode sampler_mode_from_string(const std::string& name);

struct PlannerConfig {
  double step = 1.0;              // steering step (m)
  double rewire_radius = 2.5;     // fixed RRT* neighborhood (m)
  int max_iterations = 3000;
  // Iterations spent improving the tree after the first goal connection.
  // Negative means "run until max_iterations".
  int refine_iterations = 200;
  double goal_tolerance = 0.5;    // (m)
  double horizon = 10.0;          // H (m)
  double d_safe = 0.4;            // clearance a selected path must keep (m)
  double edge_clearance = 0.2;    // clearance every tree edge must keep (m)
  int num_parallel = 4;           // N
  SamplerMode sampler_mode = SamplerMode::EllipsoidSet;
  int sample_n = 8;               // lattice parameter of the search-space sampler
  int goal_bias_period = 10;      // every k-th draw (on average) is the goal
  double collision_step = 0.1;    // segment sampling step (m)
  double grid_res = 0.5;          // A* lattice spacing (m)
  Aabb bounds{Vec3::Zero(), Vec3::Constant(20.0)};
  std::uint64_t seed = 1;

  // Throws ValidationError naming the offending field.
  void validate() const;
};

struct PathCandidate {
  std::vector<Vec3> waypoints;
  Vec3 goal = Vec3::Zero();       // goal the cost was measured against
  double cost = 0.0;
  double min_clearance = kInf;
  int iterations = 0;
  std::size_t tree_size = 0;
};

// RRT* tree with cost-to-come bookkeeping. Node 0 is the root.
class Tree {
 public:
  explicit Tree(const Vec3& root);
  ~Tree();
  Tree(const Tree&) = delete;
  Tree& operator=(const Tree&) = delete;

  std::size_t size() const { return pos_.size(); }
  const Vec3& position(std::size_t i) const { return pos_[i]; }
  std::ptrdiff_t parent(std::size_t i) const { return parent_[i]; }
  double cost(std::size_t i) const { return cost_[i]; }

  std::size_t add(const Vec3& p, std::size_t parent);
  // Re-parents `node` under `new_parent` and pushes the cost change down
  // the subtree.
  void reparent(std::size_t node, std::size_t new_parent);

  std::size_t nearest(const Vec3& p) const;
  std::vector<std::size_t> within(const Vec3& p, double radius) const;

  std::vector<Vec3> path_to(std::size_t node) const;

  // Checks root uniqueness, acyclicity and cost = parent cost + edge length
  // for every node. Returns the largest cost mismatch, or +inf on a
  // structural violation.
  double audit() const;

 private:
  struct Index;
  std::vector<Vec3> pos_;
  std::vector<std::ptrdiff_t> parent_;
  std::vector<double> cost_;
  std::vector<std::vector<std::size_t>> children_;
  std::unique_ptr<Index> index_;
};

Vec3 steer(const Vec3& from, const Vec3& to, double step);

// Sum of consecutive segment lengths plus the distance from the last
// waypoint to `goal`.
double path_cost(std::span<const Vec3> waypoints, const Vec3& goal);
double path_length(std::span<const Vec3> waypoints);
double path_min_clearance(const InstanceMap& map, std::span<const Vec3> waypoints,
                          double step);

// Goal itself when within the horizon of start; otherwise the point at
// distance H toward the goal, replaced by the nearest free search-space
// sample when that point is occupied. Throws NoFreeIntermediateGoal.
Vec3 intermediate_goal(const Vec3& start, const Vec3& goal, const InstanceMap& map,
                       const PlannerConfig& cfg);

// Everything a group of planner instances can share read-only.
struct SearchSetup {
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();       // effective (possibly intermediate) goal
  Ellipsoid ellipsoid;
  std::shared_ptr<const SampleSet> samples;  // null in UniformBox mode
};

SearchSetup prepare_search(const InstanceMap& map, const Vec3& start, const Vec3& goal,
                           const PlannerConfig& cfg);

using TreeObserver = std::function<void(const Tree&, int iteration)>;

// One RRT* instance on a prepared setup. Throws PathNotFound.
PathCandidate rrt_star_search(const InstanceMap& map, const SearchSetup& setup,
                              const PlannerConfig& cfg,
                              const TreeObserver& observer = {});

// prepare_search + rrt_star_search.
PathCandidate plan_rrt_star(const InstanceMap& map, const Vec3& start, const Vec3& goal,
                            const PlannerConfig& cfg);

// 26-connected lattice A* with a Euclidean heuristic. Throws PathNotFound.
PathCandidate plan_a_star(const InstanceMap& map, const Vec3& start, const Vec3& goal,
                          const PlannerConfig& cfg);

struct Selection {
  PathCandidate selected;
  std::vector<PathCandidate> all;  // sorted by cost ascending
  std::size_t selected_rank = 0;   // index into `all`
  bool fallback = false;           // no candidate met d_safe
};

// Lowest-cost candidate with min_clearance >= d_safe; otherwise the
// candidate with the largest clearance.
Selection select_candidate(std::vector<PathCandidate> candidates, double d_safe);

// Runs cfg.num_parallel independent instances concurrently (seeds derived
// from cfg.seed) and selects among them. Results are collected by instance
// index, so output does not depend on thread scheduling.
// Throws AllPlannersFailed.
Selection plan_and_select(const InstanceMap& map, const SearchSetup& setup,
                          const PlannerConfig& cfg);
Selection plan_and_select(const InstanceMap& map, const Vec3& start, const Vec3& goal,
                          const PlannerConfig& cfg);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace kdplan
