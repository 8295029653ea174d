// kdplan command-line entry point.
//
// Exit codes:
//   0  success (mission: goal reached)
//   1  unexpected internal error
//   2  bad usage or malformed input (ParseError)
//   3  invalid configuration value (ValidationError)
//   4  mission: goal occupied
//   5  mission / smooth: planning or smoothing failed
//   6  mission: timeout
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "kdplan/bench.hpp"
#include "kdplan/scenario.hpp"
#include "kdplan/search_space.hpp"
#include "kdplan/smoothing.hpp"
#include "kdplan/text_io.hpp"
#include "kdplan/trajectory.hpp"

namespace fs = std::filesystem;
using namespace kdplan;

namespace {

enum ExitCode {
  kOk = 0,
  kInternal = 1,
  kParse = 2,
  kValidation = 3,
  kGoalOccupied = 4,
  kPlanFailed = 5,
  kTimeout = 6,
};

struct Common {
  std::string scenario;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

ScenarioSpec load_spec(const Common& c) {
  ScenarioSpec spec = c.scenario.empty() ? default_scenario() : parse_scenario(c.scenario);
  if (c.seed) {
    spec.seed = *c.seed;
    spec.setup.planner.seed = *c.seed;
    if (spec.world) spec.world->seed = *c.seed;
  }
  return spec;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

int cmd_bench(const Common& c, std::optional<int> worlds, const std::string& planner) {
  const ScenarioSpec spec = load_spec(c);
  const int n = worlds.value_or(spec.bench.worlds);
  const BenchResult r = run_benchmark(n, spec, planner);
  fs::create_directories(c.out);
  {
    auto f = open_out(fs::path(c.out) / "bench.csv");
    write_bench_csv(f, r);
  }
  {
    auto f = open_out(fs::path(c.out) / "bench_timing.csv");
    write_bench_timing_csv(f, r);
  }
  const std::string summary = bench_summary_json(r);
  open_out(fs::path(c.out) / "bench_summary.json") << summary;
  std::cout << summary;
  return kOk;
}

int cmd_mission(const Common& c) {
  const ScenarioSpec spec = load_spec(c);
  const PointCloud world = load_world(spec);
  const MissionLog log = run_mission(world, make_state(spec.start), spec.goal, spec.setup);

  const fs::path out(c.out);
  fs::create_directories(out);
  open_out(out / "mission_log.json") << mission_log_json(log);
  {
    auto f = open_out(out / "executed.txt");
    f << "# t x y z\n";
    char buf[128];
    for (std::size_t i = 0; i < log.executed.size(); ++i) {
      const Vec3& p = log.executed[i];
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", log.times[i], p.x(), p.y(), p.z());
      f << buf;
    }
  }
  {
    auto planned = open_out(out / "planned_waypoints.txt");
    auto smoothed = open_out(out / "smoothed_waypoints.txt");
    for (std::size_t i = 0; i < log.episodes.size(); ++i) {
      const auto& ep = log.episodes[i];
      if (!ep.success) continue;
      planned << "# episode " << i << " tick " << ep.tick << '\n';
      write_points(planned, ep.waypoints);
      smoothed << "# episode " << i << " tick " << ep.tick << '\n';
      write_points(smoothed, ep.smoothed);
    }
  }

  switch (log.outcome) {
    case MissionOutcome::GoalReached:
      std::cout << "goal reached in " << log.ticks << " ticks, " << log.replans << " replans\n";
      return kOk;
    case MissionOutcome::GoalOccupied:
      std::cerr << "goal occupied\n";
      return kGoalOccupied;
    case MissionOutcome::PlanningFailed:
      std::cerr << "planning failed: " << log.reason << '\n';
      return kPlanFailed;
    case MissionOutcome::Timeout:
      std::cerr << "timeout: " << log.reason << '\n';
      return kTimeout;
  }
  return kInternal;
}

int cmd_smooth(const Common& c, const std::string& path_file, bool use_world) {
  const ScenarioSpec spec = load_spec(c);
  const std::vector<Vec3> wps = read_points(fs::path(path_file));
  if (wps.empty()) throw ParseError(path_file + ": no waypoints");
  PointCloud cloud;
  if (use_world) cloud = load_world(spec);
  const InstanceMap map = build_instance_map(cloud, Vec3::Zero(), kInf, spec.setup.mission.inflation);

  std::vector<TrajectorySegment> segs;
  try {
    segs = smooth_path(wps, make_state(wps.front()), map, spec.setup.smoother, spec.setup.vehicle);
  } catch (const RiccatiFailure& e) {
    std::cerr << "smoothing failed: " << e.what() << '\n';
    return kPlanFailed;
  }
  const auto pts = smoothed_positions(segs);
  const BSpline spline = fit_bspline(pts, spec.setup.mission.speed);

  const fs::path out(c.out);
  fs::create_directories(out);
  {
    auto f = open_out(out / "ilqr_trajectory.txt");
    write_trajectory_rows(f, segs);
  }
  {
    auto f = open_out(out / "spline_trajectory.txt");
    write_trajectory_rows(f, spline, spec.setup.smoother.dt);
  }
  write_points(out / "smoothed_waypoints.txt", pts);
  std::cout << segs.size() << " segments, " << pts.size() << " smoothed points, duration "
            << spline.duration() << " s\n";
  return kOk;
}

int cmd_sample_space(const Common& c) {
  const ScenarioSpec spec = load_spec(c);
  const auto& pc = spec.setup.planner;
  const Ellipsoid e = build_search_space(spec.start, spec.goal, pc.bounds);
  const SampleSet s = generate_interior_points(e, pc.sample_n, pc.bounds);
  const fs::path out(c.out);
  fs::create_directories(out);
  auto f = open_out(out / "search_space.txt");
  f << "# center " << e.center.transpose() << "\n# semi_axes " << e.semi_axes.transpose() << '\n';
  write_points(f, s.points);
  std::cout << s.points.size() << " points\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinodynamic replanning: benchmark, mission simulation and smoothing tools"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", common.scenario, "Scenario YAML file");
    sub->add_option("--out", common.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", common.seed, "Override the master seed");
  };

  std::optional<int> worlds;
  std::string planner;
  auto* bench = app.add_subcommand("bench", "Planner comparison over random worlds");
  add_common(bench);
  bench->add_option("--worlds", worlds, "Number of worlds")->check(CLI::PositiveNumber);
  bench->add_option("--planner", planner, "Run only this planner")
      ->check(CLI::IsMember({"a_star", "rrt_original", "rrt_improved"}));

  auto* mission = app.add_subcommand("mission", "Closed-loop replanning simulation");
  add_common(mission);

  std::string path_file;
  bool use_world = false;
  auto* smooth = app.add_subcommand("smooth", "Smooth a waypoint file with iLQR + B-spline");
  add_common(smooth);
  smooth->add_option("--path", path_file, "Waypoint file (x y z per line)")->required();
  smooth->add_flag("--with-world", use_world, "Penalize obstacles of the scenario world");

  auto* space = app.add_subcommand("sample-space", "Dump the search-space sample points");
  add_common(space);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  try {
    if (*bench) return cmd_bench(common, worlds, planner);
    if (*mission) return cmd_mission(common);
    if (*smooth) return cmd_smooth(common, path_file, use_world);
    if (*space) return cmd_sample_space(common);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const ValidationError& e) {
    std::cerr << "invalid value: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
