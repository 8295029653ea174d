#include <gtest/gtest.h>

#include <map>
#include <random>

#include "kdplan/planners.hpp"
#include "oracles.hpp"

using namespace kdplan;

namespace {

InstanceMap empty_map() { return build_instance_map(PointCloud{}, Vec3::Zero(), kInf, 0.0); }

// Dense spherical shell of points around c.
PointCloud shell(const Vec3& c, double radius, int n = 600) {
  PointCloud out;
  const double golden = M_PI * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    out.points.push_back(c + radius * Vec3(r * std::cos(golden * i), r * std::sin(golden * i), z));
  }
  return out;
}

PlannerConfig small_cfg() {
  PlannerConfig cfg;
  cfg.bounds = {Vec3::Constant(-10), Vec3::Constant(10)};
  return cfg;
}

void expect_valid_candidate(const InstanceMap& map, const PathCandidate& c, const PlannerConfig& cfg) {
  ASSERT_FALSE(c.waypoints.empty());
  for (std::size_t i = 0; i + 1 < c.waypoints.size(); ++i)
    EXPECT_TRUE(segment_clear(map, c.waypoints[i], c.waypoints[i + 1], cfg.collision_step,
                              cfg.edge_clearance));
  EXPECT_NEAR(c.cost, oracle::path_cost(c.waypoints, c.goal), 1e-9);
  EXPECT_LE(path_length(c.waypoints), cfg.horizon + cfg.step + 1e-9);
}

}  // namespace

TEST(Steer, Examples) {
  EXPECT_EQ(steer(Vec3::Zero(), Vec3(10, 0, 0), 1.0), Vec3(1, 0, 0));
  EXPECT_EQ(steer(Vec3::Zero(), Vec3(0.5, 0, 0), 1.0), Vec3(0.5, 0, 0));
  EXPECT_EQ(steer(Vec3(1, 2, 3), Vec3(1, 2, 3), 1.0), Vec3(1, 2, 3));
  EXPECT_THROW(steer(Vec3::Zero(), Vec3::Ones(), 0.0), std::invalid_argument);
}

TEST(PathCost, Examples) {
  const std::vector<Vec3> line{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  EXPECT_DOUBLE_EQ(path_cost(line, Vec3(3, 0, 0)), 3.0);
  const std::vector<Vec3> single{Vec3::Zero()};
  EXPECT_DOUBLE_EQ(path_cost(single, Vec3(3, 4, 0)), 5.0);
  const std::vector<Vec3> diag{Vec3::Zero(), Vec3(1, 1, 0)};
  EXPECT_NEAR(path_cost(diag, Vec3(1, 1, 0)), std::sqrt(2.0), 1e-15);
}

TEST(PathCost, MatchesIndependentSummation) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-50, 50);
  std::uniform_int_distribution<int> len(1, 30);
  for (int t = 0; t < 200; ++t) {
    std::vector<Vec3> w(static_cast<std::size_t>(len(rng)));
    for (auto& p : w) p = Vec3(u(rng), u(rng), u(rng));
    const Vec3 g(u(rng), u(rng), u(rng));
    EXPECT_NEAR(path_cost(w, g), oracle::path_cost(w, g), 1e-9);
  }
}

TEST(IntermediateGoal, Examples) {
  PlannerConfig cfg = small_cfg();
  cfg.bounds = {Vec3::Constant(-30), Vec3::Constant(30)};
  const auto map = empty_map();
  EXPECT_EQ(intermediate_goal(Vec3::Zero(), Vec3(20, 0, 0), map, cfg), Vec3(10, 0, 0));
  EXPECT_EQ(intermediate_goal(Vec3::Zero(), Vec3(3, 0, 0), map, cfg), Vec3(3, 0, 0));
}

TEST(IntermediateGoal, BlockedHorizonPointFallsBackToNearestFreeSample) {
  PlannerConfig cfg = small_cfg();
  cfg.bounds = {Vec3::Constant(-30), Vec3::Constant(30)};
  const auto map = build_instance_map(PointCloud{{Vec3(10, 0, 0)}}, Vec3::Zero(), kInf, 0.3);
  const Vec3 g = intermediate_goal(Vec3::Zero(), Vec3(20, 0, 0), map, cfg);
  EXPECT_GE(map.signed_distance(g), cfg.d_safe);

  // Oracle: scan the same sample set by distance to the horizon point.
  const Vec3 h(10, 0, 0);
  const auto e = build_search_space(Vec3::Zero(), h, cfg.bounds);
  const auto s = generate_interior_points(e, cfg.sample_n, cfg.bounds);
  double best = kInf;
  for (const auto& p : s.points)
    if (map.signed_distance(p) >= cfg.d_safe) best = std::min(best, (p - h).norm());
  EXPECT_DOUBLE_EQ((g - h).norm(), best);
}

TEST(Tree, CostBookkeepingAndReparent) {
  Tree t(Vec3::Zero());
  const auto a = t.add(Vec3(1, 0, 0), 0);
  const auto b = t.add(Vec3(1, 1, 0), a);
  const auto c = t.add(Vec3(1, 2, 0), b);
  EXPECT_DOUBLE_EQ(t.cost(c), 3.0);
  t.reparent(b, 0);
  EXPECT_NEAR(t.cost(b), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(t.cost(c), std::sqrt(2.0) + 1.0, 1e-15);
  EXPECT_LT(t.audit(), 1e-12);
  EXPECT_EQ(t.path_to(c), (std::vector<Vec3>{Vec3::Zero(), Vec3(1, 1, 0), Vec3(1, 2, 0)}));
  EXPECT_EQ(t.nearest(Vec3(0.9, 0.1, 0)), a);
  auto near = t.within(Vec3(1, 1, 0), 1.01);
  std::sort(near.begin(), near.end());
  EXPECT_EQ(near, (std::vector<std::size_t>{a, b, c}));
}

TEST(RrtStar, EmptyMapNearOptimal) {
  PlannerConfig cfg = small_cfg();
  cfg.refine_iterations = -1;
  cfg.max_iterations = 3000;
  const auto map = empty_map();
  const auto c = plan_rrt_star(map, Vec3::Zero(), Vec3(5, 0, 0), cfg);
  EXPECT_EQ(c.waypoints.front(), Vec3::Zero());
  EXPECT_LE((c.waypoints.back() - Vec3(5, 0, 0)).norm(), cfg.goal_tolerance);
  EXPECT_LE(c.cost, 1.2 * 5.0);
  EXPECT_EQ(c.iterations, 3000);
  expect_valid_candidate(map, c, cfg);
}

TEST(RrtStar, BothSamplerModesProduceValidPaths) {
  const PointCloud world = random_world({50, 20.0, 0.5, 17});
  const auto map = build_instance_map(world, Vec3::Zero(), kInf, 0.3);
  PlannerConfig cfg;
  const Vec3 s(5, 10, 10), g(15, 10, 10);
  for (auto mode : {SamplerMode::EllipsoidSet, SamplerMode::UniformBox}) {
    cfg.sampler_mode = mode;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      cfg.seed = seed;
      try {
        expect_valid_candidate(map, plan_rrt_star(map, s, g, cfg), cfg);
      } catch (const PathNotFound&) {
      }
    }
  }
}

TEST(RrtStar, EnclosedGoalIsNotFound) {
  PlannerConfig cfg = small_cfg();
  cfg.max_iterations = 400;
  const auto map = build_instance_map(shell(Vec3(4, 0, 0), 1.2), Vec3::Zero(), kInf, 0.3);
  EXPECT_THROW(plan_rrt_star(map, Vec3::Zero(), Vec3(4, 0, 0), cfg), PathNotFound);
}

TEST(RrtStar, DeterministicForFixedSeed) {
  const auto map = build_instance_map(random_world({50, 20.0, 0.5, 2}), Vec3::Zero(), kInf, 0.3);
  PlannerConfig cfg;
  cfg.seed = 99;
  const auto a = plan_rrt_star(map, Vec3(5, 10, 10), Vec3(15, 10, 10), cfg);
  const auto b = plan_rrt_star(map, Vec3(5, 10, 10), Vec3(15, 10, 10), cfg);
  EXPECT_EQ(a.waypoints, b.waypoints);
  EXPECT_EQ(a.cost, b.cost);
}

TEST(RrtStar, TreeInvariantsHoldEveryIteration) {
  const auto map = build_instance_map(random_world({30, 10.0, 0.5, 8}), Vec3::Zero(), kInf, 0.2);
  PlannerConfig cfg;
  cfg.bounds = {Vec3::Zero(), Vec3::Constant(10)};
  cfg.max_iterations = 400;
  cfg.refine_iterations = -1;
  std::map<std::size_t, double> last_cost;
  double worst_audit = 0.0;
  int increases = 0;
  auto observer = [&](const Tree& t, int) {
    worst_audit = std::max(worst_audit, t.audit());
    for (std::size_t i = 0; i < t.size(); ++i) {
      auto it = last_cost.find(i);
      if (it != last_cost.end() && t.cost(i) > it->second + 1e-12) ++increases;
      last_cost[i] = t.cost(i);
    }
  };
  const Vec3 start(1, 1, 1);
  ASSERT_GE(map.signed_distance(start), cfg.d_safe);
  const auto setup = prepare_search(map, start, Vec3(9, 9, 9), cfg);
  try {
    rrt_star_search(map, setup, cfg, observer);
  } catch (const PathNotFound&) {
  }
  EXPECT_LT(worst_audit, 1e-9);
  EXPECT_EQ(increases, 0);
  EXPECT_FALSE(last_cost.empty());
}

TEST(RrtStar, LongGoalIsTruncatedToHorizon) {
  PlannerConfig cfg;
  cfg.bounds = {Vec3::Zero(), Vec3::Constant(40)};
  const auto map = empty_map();
  const auto c = plan_rrt_star(map, Vec3(5, 20, 20), Vec3(35, 20, 20), cfg);
  EXPECT_LE(path_length(c.waypoints), cfg.horizon + cfg.step);
  EXPECT_EQ(c.goal, Vec3(15, 20, 20));
}

TEST(AStar, StartEqualsGoal) {
  PlannerConfig cfg = small_cfg();
  const auto c = plan_a_star(empty_map(), Vec3(1, 1, 1), Vec3(1, 1, 1), cfg);
  ASSERT_EQ(c.waypoints.size(), 1u);
  EXPECT_EQ(c.cost, 0.0);
}

TEST(AStar, AxisAlignedStraightLine) {
  PlannerConfig cfg = small_cfg();
  const auto c = plan_a_star(empty_map(), Vec3(-4, 0, 0), Vec3(4, 0, 0), cfg);
  EXPECT_NEAR(path_length(c.waypoints), 8.0, cfg.grid_res);
  EXPECT_NEAR(c.cost, oracle::path_cost(c.waypoints, c.goal), 1e-9);
}

TEST(AStar, WalledOffGoalIsNotFound) {
  PlannerConfig cfg = small_cfg();
  const auto map = build_instance_map(shell(Vec3(4, 0, 0), 1.5, 1500), Vec3::Zero(), kInf, 0.3);
  EXPECT_THROW(plan_a_star(map, Vec3::Zero(), Vec3(4, 0, 0), cfg), PathNotFound);
}

TEST(AStar, AvoidsObstaclesWithClearance) {
  PlannerConfig cfg;
  const auto map = build_instance_map(random_world({50, 20.0, 0.5, 4}), Vec3::Zero(), kInf, 0.3);
  try {
    const auto c = plan_a_star(map, Vec3(2, 2, 2), Vec3(18, 18, 18), cfg);
    for (std::size_t i = 0; i + 1 < c.waypoints.size(); ++i)
      EXPECT_TRUE(segment_clear(map, c.waypoints[i], c.waypoints[i + 1], cfg.collision_step,
                                cfg.edge_clearance));
  } catch (const PathNotFound&) {
    GTEST_SKIP() << "start or goal occupied in this world";
  }
}

TEST(Selection, LowestCostSafeCandidateWins) {
  // Two corridors between start (0,0,0) and goal (10,0,0): the direct one
  // passes 0.3 m from an obstacle point, the detour keeps 2 m of clearance.
  const Vec3 s(0, 0, 0), g(10, 0, 0);
  const PointCloud world{{Vec3(5, 0.3, 0)}};
  const auto map = build_instance_map(world, Vec3::Zero(), kInf, 0.0);
  PlannerConfig cfg;

  auto make = [&](std::vector<Vec3> w) {
    PathCandidate c;
    c.waypoints = std::move(w);
    c.goal = g;
    c.cost = path_cost(c.waypoints, g);
    c.min_clearance = path_min_clearance(map, c.waypoints, cfg.collision_step);
    return c;
  };
  const auto direct = make({s, Vec3(5, 0, 0), g});
  const auto detour = make({s, Vec3(5, -2.3, 0), g});
  const auto wide = make({s, Vec3(5, -5, 0), g});

  // Exhaustive clearance check of the hand-built corridors.
  auto exhaustive = [&](const PathCandidate& c) {
    double m = kInf;
    for (std::size_t i = 0; i + 1 < c.waypoints.size(); ++i)
      m = std::min(m, oracle::point_segment_distance(world.points[0], c.waypoints[i], c.waypoints[i + 1]));
    return m;
  };
  ASSERT_LT(exhaustive(direct), cfg.d_safe);
  ASSERT_GE(exhaustive(detour), cfg.d_safe);
  ASSERT_LT(direct.cost, detour.cost);
  ASSERT_LT(detour.cost, wide.cost);

  const auto sel = select_candidate({wide, direct, detour}, cfg.d_safe);
  EXPECT_FALSE(sel.fallback);
  EXPECT_EQ(sel.selected_rank, 1u);
  EXPECT_EQ(sel.selected.waypoints, detour.waypoints);
  EXPECT_EQ(sel.all.front().waypoints, direct.waypoints);
}

TEST(Selection, FallbackPicksMaximumClearance) {
  PathCandidate a, b, c;
  a.cost = 1;
  a.min_clearance = 0.1;
  b.cost = 2;
  b.min_clearance = 0.3;
  c.cost = 3;
  c.min_clearance = 0.2;
  const auto sel = select_candidate({c, b, a}, 0.4);
  EXPECT_TRUE(sel.fallback);
  EXPECT_EQ(sel.selected.cost, 2);
  EXPECT_THROW(select_candidate({}, 0.4), AllPlannersFailed);
}

TEST(PlanAndSelect, FourCandidatesOnEmptyMap) {
  PlannerConfig cfg = small_cfg();
  cfg.num_parallel = 4;
  const auto map = empty_map();
  const auto sel = plan_and_select(map, Vec3::Zero(), Vec3(5, 0, 0), cfg);
  ASSERT_EQ(sel.all.size(), 4u);
  for (std::size_t i = 1; i < sel.all.size(); ++i) EXPECT_LE(sel.all[i - 1].cost, sel.all[i].cost);
  EXPECT_EQ(sel.selected_rank, 0u);
  EXPECT_EQ(sel.selected.cost, sel.all.front().cost);
}

TEST(PlanAndSelect, SingleInstanceAndDeterminism) {
  const auto map = build_instance_map(random_world({50, 20.0, 0.5, 12}), Vec3::Zero(), kInf, 0.3);
  PlannerConfig cfg;
  cfg.num_parallel = 1;
  const auto one = plan_and_select(map, Vec3(5, 10, 10), Vec3(15, 10, 10), cfg);
  EXPECT_EQ(one.all.size(), 1u);

  cfg.num_parallel = 4;
  const auto a = plan_and_select(map, Vec3(5, 10, 10), Vec3(15, 10, 10), cfg);
  const auto b = plan_and_select(map, Vec3(5, 10, 10), Vec3(15, 10, 10), cfg);
  ASSERT_EQ(a.all.size(), b.all.size());
  for (std::size_t i = 0; i < a.all.size(); ++i) EXPECT_EQ(a.all[i].waypoints, b.all[i].waypoints);
  EXPECT_EQ(a.selected.waypoints, b.selected.waypoints);
}

TEST(PlanAndSelect, AllFailing) {
  PlannerConfig cfg = small_cfg();
  cfg.max_iterations = 200;
  cfg.num_parallel = 2;
  const auto map = build_instance_map(shell(Vec3(4, 0, 0), 1.2), Vec3::Zero(), kInf, 0.3);
  EXPECT_THROW(plan_and_select(map, Vec3::Zero(), Vec3(4, 0, 0), cfg), AllPlannersFailed);
}

TEST(PlannerConfig, ValidationNamesField) {
  PlannerConfig cfg;
  cfg.d_safe = -1;
  try {
    cfg.validate();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.key, "d_safe");
  }
  cfg = PlannerConfig{};
  cfg.num_parallel = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(DeriveSeed, DistinctPerIndex) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 3), derive_seed(5, 3));
}
