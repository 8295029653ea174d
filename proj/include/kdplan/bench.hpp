#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "kdplan/scenario.hpp"

namespace kdplan {

inline constexpr std::array<const char*, 3> kBenchPlanners = {"a_star", "rrt_original",
                                                              "rrt_improved"};

struct BenchRow {
  int world = 0;
  std::string planner;
  bool success = false;
  std::string failure;       // empty on success
  double time_s = 0.0;       // wall clock around the planning call
  double cost = 0.0;         // meaningful only on success
  double path_length = 0.0;
  double min_clearance = 0.0;
  int iterations = 0;
  std::size_t nodes = 0;
};

struct PlannerSummary {
  std::string planner;
  int runs = 0;
  int successes = 0;
  double mean_time_s = 0.0;
  double median_time_s = 0.0;
  double mean_cost = 0.0;    // over successful runs
};

struct PhaseBreakdown {
  // map build, search space, RRT*, iLQR, B-spline
  static constexpr std::array<const char*, 5> kNames = {"map_build", "search_space", "rrt_star",
                                                        "ilqr", "bspline"};
  std::array<double, 5> seconds{};
  int runs = 0;              // pipelines that completed every phase
  int failures = 0;

  std::array<double, 5> percent() const;
};

struct MapBuildTiming {
  int scans = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double max_ms = 0.0;
  double mean_points = 0.0;  // points inside the instance radius
};

struct BenchResult {
  std::uint64_t seed = 0;
  int worlds = 0;
  std::vector<BenchRow> rows;  // sorted by (world, planner order)
  std::vector<PlannerSummary> summary;
  MapBuildTiming map_build;
  PhaseBreakdown phases;
};

// World w uses seed derive_seed(spec.seed, w). `planner_filter` restricts
// the sweep to one planner name (empty runs all three). Per-row failures
// are recorded, never thrown.
BenchResult run_benchmark(int n_worlds, const ScenarioSpec& spec,
                          const std::string& planner_filter = {});

// Deterministic columns only (no wall-clock values).
void write_bench_csv(std::ostream& out, const BenchResult& r);
// world,planner,time_s
void write_bench_timing_csv(std::ostream& out, const BenchResult& r);
std::string bench_summary_json(const BenchResult& r);

std::vector<PlannerSummary> summarize(const std::vector<BenchRow>& rows);

}  // namespace kdplan
