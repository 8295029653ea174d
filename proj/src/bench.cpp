#include "kdplan/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "kdplan/smoothing.hpp"
#include "kdplan/trajectory.hpp"

namespace kdplan {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int planner_order(const std::string& name) {
  for (std::size_t i = 0; i < kBenchPlanners.size(); ++i)
    if (name == kBenchPlanners[i]) return static_cast<int>(i);
  return static_cast<int>(kBenchPlanners.size());
}

BenchRow run_one(int world, const std::string& planner, const InstanceMap& map,
                 const ScenarioSpec& spec, std::uint64_t seed) {
  BenchRow row;
  row.world = world;
  row.planner = planner;
  PlannerConfig cfg = spec.setup.planner;
  cfg.seed = seed;
  const auto t0 = Clock::now();
  try {
    PathCandidate c;
    if (planner == "a_star") {
      c = plan_a_star(map, spec.start, spec.goal, cfg);
    } else {
      cfg.sampler_mode =
          planner == "rrt_original" ? SamplerMode::UniformBox : SamplerMode::EllipsoidSet;
      c = plan_rrt_star(map, spec.start, spec.goal, cfg);
    }
    row.time_s = seconds_since(t0);
    row.success = true;
    row.cost = c.cost;
    row.path_length = path_length(c.waypoints);
    row.min_clearance = c.min_clearance;
    row.iterations = c.iterations;
    row.nodes = c.tree_size;
  } catch (const std::exception& e) {
    row.time_s = seconds_since(t0);
    row.failure = e.what();
  }
  return row;
}

void time_pipeline(const PointCloud& cloud, const ScenarioSpec& spec, std::uint64_t seed,
                   PhaseBreakdown& out) {
  std::array<double, 5> t{};
  try {
    auto t0 = Clock::now();
    const InstanceMap map = build_instance_map(cloud, spec.start, spec.setup.mission.map_radius,
                                               spec.setup.mission.inflation);
    t[0] = seconds_since(t0);

    PlannerConfig cfg = spec.setup.planner;
    cfg.seed = seed;
    t0 = Clock::now();
    const SearchSetup setup = prepare_search(map, spec.start, spec.goal, cfg);
    t[1] = seconds_since(t0);

    t0 = Clock::now();
    const Selection sel = plan_and_select(map, setup, cfg);
    t[2] = seconds_since(t0);

    t0 = Clock::now();
    const auto segs = smooth_path(sel.selected.waypoints, make_state(spec.start), map,
                                  spec.setup.smoother, spec.setup.vehicle);
    t[3] = seconds_since(t0);

    t0 = Clock::now();
    const auto pts = smoothed_positions(segs);
    const BSpline spline = fit_bspline(pts, spec.setup.mission.speed);
    (void)spline;
    t[4] = seconds_since(t0);
  } catch (const std::exception&) {
    ++out.failures;
    return;
  }
  for (std::size_t i = 0; i < t.size(); ++i) out.seconds[i] += t[i];
  ++out.runs;
}

}  // namespace

std::array<double, 5> PhaseBreakdown::percent() const {
  std::array<double, 5> p{};
  const double total = std::accumulate(seconds.begin(), seconds.end(), 0.0);
  if (total <= 0.0) return p;
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = 100.0 * seconds[i] / total;
  return p;
}

std::vector<PlannerSummary> summarize(const std::vector<BenchRow>& rows) {
  std::vector<PlannerSummary> out;
  for (const char* name : kBenchPlanners) {
    PlannerSummary s;
    s.planner = name;
    std::vector<double> times;
    double cost_sum = 0.0;
    for (const auto& r : rows) {
      if (r.planner != name) continue;
      ++s.runs;
      times.push_back(r.time_s);
      if (r.success) {
        ++s.successes;
        cost_sum += r.cost;
      }
    }
    if (s.runs == 0) continue;
    s.mean_time_s = std::accumulate(times.begin(), times.end(), 0.0) / s.runs;
    s.median_time_s = median(times);
    s.mean_cost = s.successes ? cost_sum / s.successes : 0.0;
    out.push_back(s);
  }
  return out;
}

BenchResult run_benchmark(int n_worlds, const ScenarioSpec& spec,
                          const std::string& planner_filter) {
  if (n_worlds < 1) throw ValidationError("worlds", "must be >= 1");
  std::vector<std::string> planners;
  for (const char* p : kBenchPlanners)
    if (planner_filter.empty() || planner_filter == p) planners.emplace_back(p);
  if (planners.empty())
    throw ValidationError("planner", "unknown planner '" + planner_filter + "'");

  BenchResult res;
  res.seed = spec.seed;
  res.worlds = n_worlds;
  std::vector<double> build_ms;
  double points_sum = 0.0;

  for (int w = 0; w < n_worlds; ++w) {
    const std::uint64_t wseed = derive_seed(spec.seed, static_cast<std::uint64_t>(w));
    PointCloud cloud;
    if (spec.world) {
      WorldSpec ws = *spec.world;
      ws.seed = wseed;
      cloud = random_world(ws);
    } else {
      cloud = load_world(spec);
    }
    const InstanceMap full = build_instance_map(cloud, Vec3::Zero(), kInf,
                                                spec.setup.mission.inflation);

    for (const auto& p : planners) res.rows.push_back(run_one(w, p, full, spec, wseed));

    // Instance-map rebuilds at scan positions spread along start -> goal.
    for (int s = 0; s < spec.bench.map_scans; ++s) {
      const double f = spec.bench.map_scans > 1 ? double(s) / (spec.bench.map_scans - 1) : 0.0;
      const Vec3 c = spec.start + f * (spec.goal - spec.start);
      const auto t0 = Clock::now();
      const InstanceMap m = build_instance_map(cloud, c, spec.setup.mission.map_radius,
                                               spec.setup.mission.inflation);
      build_ms.push_back(1e3 * seconds_since(t0));
      points_sum += static_cast<double>(m.size());
    }

    if (w < spec.bench.phase_worlds) time_pipeline(cloud, spec, wseed, res.phases);
  }

  std::stable_sort(res.rows.begin(), res.rows.end(), [](const BenchRow& a, const BenchRow& b) {
    if (a.world != b.world) return a.world < b.world;
    return planner_order(a.planner) < planner_order(b.planner);
  });
  res.summary = summarize(res.rows);

  res.map_build.scans = static_cast<int>(build_ms.size());
  if (!build_ms.empty()) {
    res.map_build.mean_ms =
        std::accumulate(build_ms.begin(), build_ms.end(), 0.0) / build_ms.size();
    res.map_build.median_ms = median(build_ms);
    res.map_build.max_ms = *std::max_element(build_ms.begin(), build_ms.end());
    res.map_build.mean_points = points_sum / build_ms.size();
  }
  return res;
}

void write_bench_csv(std::ostream& out, const BenchResult& r) {
  out << "world,planner,success,cost,path_length,min_clearance,iterations,nodes\n";
  for (const auto& row : r.rows) {
    out << row.world << ',' << row.planner << ',' << (row.success ? 1 : 0) << ',';
    if (row.success) {
      out << num(row.cost) << ',' << num(row.path_length) << ',' << num(row.min_clearance);
    } else {
      out << ",,";
    }
    out << ',' << row.iterations << ',' << row.nodes << '\n';
  }
}

void write_bench_timing_csv(std::ostream& out, const BenchResult& r) {
  out << "world,planner,time_s\n";
  for (const auto& row : r.rows) out << row.world << ',' << row.planner << ',' << num(row.time_s) << '\n';
}

std::string bench_summary_json(const BenchResult& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["worlds"] = r.worlds;
  auto& planners = j["planners"] = nlohmann::ordered_json::array();
  for (const auto& s : r.summary) {
    planners.push_back({{"planner", s.planner},
                        {"runs", s.runs},
                        {"success_rate", s.runs ? double(s.successes) / s.runs : 0.0},
                        {"mean_time_s", s.mean_time_s},
                        {"median_time_s", s.median_time_s},
                        {"mean_cost", s.mean_cost}});
  }
  j["map_build"] = {{"scans", r.map_build.scans},
                    {"mean_ms", r.map_build.mean_ms},
                    {"median_ms", r.map_build.median_ms},
                    {"max_ms", r.map_build.max_ms},
                    {"mean_points", r.map_build.mean_points}};
  nlohmann::ordered_json phases;
  const auto pct = r.phases.percent();
  for (std::size_t i = 0; i < pct.size(); ++i) phases[PhaseBreakdown::kNames[i]] = pct[i];
  j["phase_percent"] = phases;
  j["phase_runs"] = r.phases.runs;
  j["phase_failures"] = r.phases.failures;
  return j.dump(2) + "\n";
}

}  // namespace kdplan
