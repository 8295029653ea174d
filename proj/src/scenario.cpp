#include "kdplan/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "kdplan/text_io.hpp"

namespace kdplan {

namespace {

// Reads one mapping, remembering which keys were consumed so leftovers can
// be reported as unknown.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
      throw ParseError(where() + "expected a mapping");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  bool has(const std::string& k) const { return node_ && node_.IsMap() && node_[k]; }

  template <typename T>
  void get(const std::string& k, T& out) {
    if (!has(k)) return;
    seen_.insert(k);
    try {
      out = node_[k].as<T>();
    } catch (const YAML::Exception&) {
      throw ParseError(key(k) + ": wrong type");
    }
  }

  template <int N>
  void get_vec(const std::string& k, Eigen::Matrix<double, N, 1>& out) {
    if (!has(k)) return;
    seen_.insert(k);
    const YAML::Node n = node_[k];
    if (!n.IsSequence() || n.size() != static_cast<std::size_t>(N))
      throw ParseError(key(k) + ": expected a list of " + std::to_string(N) + " numbers");
    try {
      for (int i = 0; i < N; ++i) out(i) = n[static_cast<std::size_t>(i)].as<double>();
    } catch (const YAML::Exception&) {
      throw ParseError(key(k) + ": expected numbers");
    }
  }

  void get_int_list(const std::string& k, std::vector<int>& out) {
    if (!has(k)) return;
    seen_.insert(k);
    try {
      out = node_[k].as<std::vector<int>>();
    } catch (const YAML::Exception&) {
      throw ParseError(key(k) + ": expected a list of integers");
    }
  }

  Section child(const std::string& k) {
    if (has(k)) seen_.insert(k);
    return Section(has(k) ? node_[k] : YAML::Node(), key(k));
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const auto k = kv.first.as<std::string>();
      if (!seen_.count(k)) throw ValidationError(key(k), "unknown key");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
void validate_section(const std::string& prefix, Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + "." + e.key,
                          std::string(e.what()).substr(e.key.size() + 2));
  }
}

void read_planner(Section s, PlannerConfig& c) {
  s.get("step", c.step);
  s.get("rewire_radius", c.rewire_radius);
  s.get("max_iterations", c.max_iterations);
  s.get("refine_iterations", c.refine_iterations);
  s.get("goal_tolerance", c.goal_tolerance);
  s.get("horizon", c.horizon);
  s.get("d_safe", c.d_safe);
  s.get("edge_clearance", c.edge_clearance);
  s.get("num_parallel", c.num_parallel);
  if (s.has("sampler_mode")) {
    std::string mode;
    s.get("sampler_mode", mode);
    try {
      c.sampler_mode = sampler_mode_from_string(mode);
    } catch (const ValidationError&) {
      throw ValidationError(s.key("sampler_mode"), "expected ellipsoid_set or uniform_box");
    }
  }
  s.get("sample_n", c.sample_n);
  s.get("goal_bias_period", c.goal_bias_period);
  s.get("collision_step", c.collision_step);
  s.get("grid_res", c.grid_res);
  Section b = s.child("bounds");
  b.get_vec("min", c.bounds.min);
  b.get_vec("max", c.bounds.max);
  b.finish();
  s.finish();
}

void read_smoother(Section s, SmootherConfig& c) {
  s.get("steps", c.steps);
  s.get("min_steps", c.min_steps);
  s.get("max_steps", c.max_steps);
  s.get("v_nom", c.v_nom);
  s.get("dt", c.dt);
  s.get_vec("q_stage", c.q_stage);
  s.get_vec("q_final", c.q_final);
  s.get_vec("r_ctrl", c.r_ctrl);
  s.get("q", c.q_obstacle);
  s.get("d_active", c.d_active);
  s.get("max_iter", c.max_iter);
  s.get("cost_tol", c.cost_tol);
  s.get("reg0", c.reg0);
  s.get("reg_max", c.reg_max);
  s.finish();
}

void read_vehicle(Section s, VehicleParams& v) {
  s.get("mass", v.mass);
  s.get_vec("inertia", v.inertia_diag);
  s.get("arm", v.arm);
  s.get("k_v", v.k_v);
  s.get("k_m", v.k_m);
  s.get("gravity", v.gravity);
  s.get("clamp_thrust", v.clamp_thrust);
  s.finish();
}

void read_mission(Section s, MissionConfig& m) {
  s.get("tick", m.tick);
  s.get("tau", m.tau);
  s.get_vec("kp", m.gains.kp);
  s.get_vec("kd", m.gains.kd);
  s.get("kp_yaw", m.gains.kp_yaw);
  s.get("map_radius", m.map_radius);
  s.get("inflation", m.inflation);
  s.get("lookahead", m.lookahead);
  s.get("lookahead_step", m.lookahead_step);
  s.get("goal_tolerance", m.goal_tolerance);
  s.get("max_ticks", m.max_ticks);
  s.get("speed", m.speed);
  s.get("tracking_slack", m.tracking_slack);
  s.get("max_plan_attempts", m.max_plan_attempts);
  s.get("max_plan_failures", m.max_plan_failures);
  s.get_int_list("sudden_change_ticks", m.sudden_change_ticks);
  s.finish();
}

}  // namespace

ScenarioSpec parse_scenario_text(const std::string& yaml, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("malformed scenario: ") + e.what());
  }
  if (!root.IsMap()) throw ParseError("scenario must be a mapping at the top level");

  ScenarioSpec spec;
  Section top(root, "");
  top.get("seed", spec.seed);

  if (!top.has("world")) throw ValidationError("world", "required");
  {
    Section w = top.child("world");
    if (w.has("cloud")) {
      std::string file;
      w.get("cloud", file);
      spec.cloud_file = base_dir.empty() ? std::filesystem::path(file) : base_dir / file;
    } else {
      WorldSpec ws;
      ws.seed = spec.seed;
      w.get("n_obstacles", ws.n_obstacles);
      w.get("cube_size", ws.cube_size);
      w.get("obstacle_radius", ws.obstacle_radius);
      w.get("seed", ws.seed);
      spec.world = ws;
    }
    w.finish();
  }

  if (!top.has("start")) throw ValidationError("start", "required");
  if (!top.has("goal")) throw ValidationError("goal", "required");
  top.get_vec("start", spec.start);
  top.get_vec("goal", spec.goal);

  // Planner bounds default to the generated world cube.
  if (spec.world) {
    spec.setup.planner.bounds = {Vec3::Zero(), Vec3::Constant(spec.world->cube_size)};
  }

  read_planner(top.child("planner"), spec.setup.planner);
  spec.setup.planner.seed = spec.seed;
  read_smoother(top.child("smoother"), spec.setup.smoother);
  read_vehicle(top.child("vehicle"), spec.setup.vehicle);
  read_mission(top.child("mission"), spec.setup.mission);
  {
    Section b = top.child("bench");
    b.get("worlds", spec.bench.worlds);
    b.get("map_scans", spec.bench.map_scans);
    b.get("phase_worlds", spec.bench.phase_worlds);
    b.finish();
  }
  top.finish();

  if (spec.world) {
    if (spec.world->n_obstacles < 0) throw ValidationError("world.n_obstacles", "must be >= 0");
    if (!(spec.world->cube_size > 0.0)) throw ValidationError("world.cube_size", "must be > 0");
    if (!(spec.world->obstacle_radius >= 0.0))
      throw ValidationError("world.obstacle_radius", "must be >= 0");
  } else if (!std::filesystem::exists(spec.cloud_file)) {
    throw ValidationError("world.cloud", "file not found: " + spec.cloud_file.string());
  }
  validate_section("planner", [&] { spec.setup.planner.validate(); });
  validate_section("smoother", [&] { spec.setup.smoother.validate(); });
  validate_section("vehicle", [&] { spec.setup.vehicle.validate(); });
  validate_section("mission", [&] { spec.setup.mission.validate(); });
  if (spec.bench.worlds < 1) throw ValidationError("bench.worlds", "must be >= 1");
  if (spec.bench.map_scans < 0) throw ValidationError("bench.map_scans", "must be >= 0");
  if (spec.bench.phase_worlds < 0) throw ValidationError("bench.phase_worlds", "must be >= 0");
  if (!spec.start.allFinite()) throw ValidationError("start", "must be finite");
  if (!spec.goal.allFinite()) throw ValidationError("goal", "must be finite");
  return spec;
}

ScenarioSpec parse_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open scenario file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), file.parent_path());
}

namespace {

template <typename V>
void emit_vec(YAML::Emitter& out, const char* k, const V& v) {
  out << YAML::Key << k << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (int i = 0; i < v.size(); ++i) out << v(i);
  out << YAML::EndSeq;
}

}  // namespace

std::string scenario_to_yaml(const ScenarioSpec& spec) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "seed" << YAML::Value << spec.seed;

  out << YAML::Key << "world" << YAML::Value << YAML::BeginMap;
  if (spec.world) {
    out << YAML::Key << "n_obstacles" << YAML::Value << spec.world->n_obstacles;
    out << YAML::Key << "cube_size" << YAML::Value << spec.world->cube_size;
    out << YAML::Key << "obstacle_radius" << YAML::Value << spec.world->obstacle_radius;
    out << YAML::Key << "seed" << YAML::Value << spec.world->seed;
  } else {
    out << YAML::Key << "cloud" << YAML::Value << spec.cloud_file.string();
  }
  out << YAML::EndMap;

  emit_vec(out, "start", spec.start);
  emit_vec(out, "goal", spec.goal);

  const auto& p = spec.setup.planner;
  out << YAML::Key << "planner" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "step" << YAML::Value << p.step;
  out << YAML::Key << "rewire_radius" << YAML::Value << p.rewire_radius;
  out << YAML::Key << "max_iterations" << YAML::Value << p.max_iterations;
  out << YAML::Key << "refine_iterations" << YAML::Value << p.refine_iterations;
  out << YAML::Key << "goal_tolerance" << YAML::Value << p.goal_tolerance;
  out << YAML::Key << "horizon" << YAML::Value << p.horizon;
  out << YAML::Key << "d_safe" << YAML::Value << p.d_safe;
  out << YAML::Key << "edge_clearance" << YAML::Value << p.edge_clearance;
  out << YAML::Key << "num_parallel" << YAML::Value << p.num_parallel;
  out << YAML::Key << "sampler_mode" << YAML::Value << to_string(p.sampler_mode);
  out << YAML::Key << "sample_n" << YAML::Value << p.sample_n;
  out << YAML::Key << "goal_bias_period" << YAML::Value << p.goal_bias_period;
  out << YAML::Key << "collision_step" << YAML::Value << p.collision_step;
  out << YAML::Key << "grid_res" << YAML::Value << p.grid_res;
  out << YAML::Key << "bounds" << YAML::Value << YAML::BeginMap;
  emit_vec(out, "min", p.bounds.min);
  emit_vec(out, "max", p.bounds.max);
  out << YAML::EndMap << YAML::EndMap;

  const auto& s = spec.setup.smoother;
  out << YAML::Key << "smoother" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "steps" << YAML::Value << s.steps;
  out << YAML::Key << "min_steps" << YAML::Value << s.min_steps;
  out << YAML::Key << "max_steps" << YAML::Value << s.max_steps;
  out << YAML::Key << "v_nom" << YAML::Value << s.v_nom;
  out << YAML::Key << "dt" << YAML::Value << s.dt;
  emit_vec(out, "q_stage", s.q_stage);
  emit_vec(out, "q_final", s.q_final);
  emit_vec(out, "r_ctrl", s.r_ctrl);
  out << YAML::Key << "q" << YAML::Value << s.q_obstacle;
  out << YAML::Key << "d_active" << YAML::Value << s.d_active;
  out << YAML::Key << "max_iter" << YAML::Value << s.max_iter;
  out << YAML::Key << "cost_tol" << YAML::Value << s.cost_tol;
  out << YAML::Key << "reg0" << YAML::Value << s.reg0;
  out << YAML::Key << "reg_max" << YAML::Value << s.reg_max;
  out << YAML::EndMap;

  const auto& v = spec.setup.vehicle;
  out << YAML::Key << "vehicle" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mass" << YAML::Value << v.mass;
  emit_vec(out, "inertia", v.inertia_diag);
  out << YAML::Key << "arm" << YAML::Value << v.arm;
  out << YAML::Key << "k_v" << YAML::Value << v.k_v;
  out << YAML::Key << "k_m" << YAML::Value << v.k_m;
  out << YAML::Key << "gravity" << YAML::Value << v.gravity;
  out << YAML::Key << "clamp_thrust" << YAML::Value << v.clamp_thrust;
  out << YAML::EndMap;

  const auto& m = spec.setup.mission;
  out << YAML::Key << "mission" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "tick" << YAML::Value << m.tick;
  out << YAML::Key << "tau" << YAML::Value << m.tau;
  emit_vec(out, "kp", m.gains.kp);
  emit_vec(out, "kd", m.gains.kd);
  out << YAML::Key << "kp_yaw" << YAML::Value << m.gains.kp_yaw;
  out << YAML::Key << "map_radius" << YAML::Value << m.map_radius;
  out << YAML::Key << "inflation" << YAML::Value << m.inflation;
  out << YAML::Key << "lookahead" << YAML::Value << m.lookahead;
  out << YAML::Key << "lookahead_step" << YAML::Value << m.lookahead_step;
  out << YAML::Key << "goal_tolerance" << YAML::Value << m.goal_tolerance;
  out << YAML::Key << "max_ticks" << YAML::Value << m.max_ticks;
  out << YAML::Key << "speed" << YAML::Value << m.speed;
  out << YAML::Key << "tracking_slack" << YAML::Value << m.tracking_slack;
  out << YAML::Key << "max_plan_attempts" << YAML::Value << m.max_plan_attempts;
  out << YAML::Key << "max_plan_failures" << YAML::Value << m.max_plan_failures;
  out << YAML::Key << "sudden_change_ticks" << YAML::Value << YAML::Flow << m.sudden_change_ticks;
  out << YAML::EndMap;

  out << YAML::Key << "bench" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "worlds" << YAML::Value << spec.bench.worlds;
  out << YAML::Key << "map_scans" << YAML::Value << spec.bench.map_scans;
  out << YAML::Key << "phase_worlds" << YAML::Value << spec.bench.phase_worlds;
  out << YAML::EndMap;

  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

ScenarioSpec default_scenario() {
  ScenarioSpec spec;
  spec.world = WorldSpec{};
  spec.world->seed = spec.seed;
  spec.start = Vec3(5.0, 10.0, 10.0);
  spec.goal = Vec3(15.0, 10.0, 10.0);
  spec.setup.planner.bounds = {Vec3::Zero(), Vec3::Constant(spec.world->cube_size)};
  spec.setup.planner.seed = spec.seed;
  return spec;
}

PointCloud load_world(const ScenarioSpec& spec) {
  if (spec.world) return random_world(*spec.world);
  return read_point_cloud(spec.cloud_file);
}

}  // namespace kdplan
