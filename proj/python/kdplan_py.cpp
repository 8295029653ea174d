#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kdplan/bench.hpp"
#include "kdplan/mission.hpp"
#include "kdplan/planners.hpp"
#include "kdplan/scenario.hpp"
#include "kdplan/search_space.hpp"
#include "kdplan/smoothing.hpp"
#include "kdplan/trajectory.hpp"

namespace py = pybind11;
using namespace kdplan;

namespace {

using Points = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor>;

Points to_array(const std::vector<Vec3>& pts) {
  Points out(static_cast<Eigen::Index>(pts.size()), 3);
  for (std::size_t i = 0; i < pts.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pts[i].transpose();
  return out;
}

std::vector<Vec3> from_array(const Points& a) {
  std::vector<Vec3> out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) out[static_cast<std::size_t>(i)] = a.row(i).transpose();
  return out;
}

py::dict candidate_dict(const PathCandidate& c) {
  py::dict d;
  d["waypoints"] = to_array(c.waypoints);
  d["goal"] = c.goal;
  d["cost"] = c.cost;
  d["min_clearance"] = c.min_clearance;
  d["iterations"] = c.iterations;
  d["tree_size"] = c.tree_size;
  return d;
}

}  // namespace

PYBIND11_MODULE(_kdplan, m) {
  m.doc() = "Kinodynamic local replanning: instance maps, RRT*, iLQR smoothing, B-splines";

  py::register_exception<PathNotFound>(m, "PathNotFound", PyExc_RuntimeError);
  py::register_exception<AllPlannersFailed>(m, "AllPlannersFailed", PyExc_RuntimeError);
  py::register_exception<NoFreeIntermediateGoal>(m, "NoFreeIntermediateGoal", PyExc_RuntimeError);
  py::register_exception<RiccatiFailure>(m, "RiccatiFailure", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::class_<InstanceMap>(m, "InstanceMap")
      .def(py::init([](const Points& cloud, const Vec3& center, double radius, double inflation) {
             return build_instance_map(PointCloud{from_array(cloud)}, center, radius, inflation);
           }),
           py::arg("cloud"), py::arg("center") = Vec3::Zero(), py::arg("radius") = kInf,
           py::arg("inflation") = 0.0)
      .def("__len__", &InstanceMap::size)
      .def("signed_distance", &InstanceMap::signed_distance, py::arg("p"))
      .def("nearest", &InstanceMap::nearest, py::arg("p"))
      .def("segment_clear",
           [](const InstanceMap& map, const Vec3& a, const Vec3& b, double step, double clearance) {
             return segment_clear(map, a, b, step, clearance);
           },
           py::arg("a"), py::arg("b"), py::arg("step") = 0.1, py::arg("clearance") = 0.0);

  m.def("random_world",
        [](int n_obstacles, double cube_size, double obstacle_radius, std::uint64_t seed) {
          return to_array(random_world({n_obstacles, cube_size, obstacle_radius, seed}).points);
        },
        py::arg("n_obstacles") = 50, py::arg("cube_size") = 20.0, py::arg("obstacle_radius") = 0.5,
        py::arg("seed") = 0);

  py::class_<Aabb>(m, "Aabb")
      .def(py::init<Vec3, Vec3>(), py::arg("min"), py::arg("max"))
      .def_readwrite("min", &Aabb::min)
      .def_readwrite("max", &Aabb::max);

  py::class_<Ellipsoid>(m, "Ellipsoid")
      .def_readonly("center", &Ellipsoid::center)
      .def_readonly("semi_axes", &Ellipsoid::semi_axes)
      .def_readonly("rotation", &Ellipsoid::rotation)
      .def("contains", &Ellipsoid::contains, py::arg("p"), py::arg("tol") = 1e-9);

  m.def("build_search_space", &build_search_space, py::arg("start"), py::arg("goal"), py::arg("bounds"));
  m.def("generate_interior_points",
        [](const Ellipsoid& e, int n, const Aabb& bounds) {
          return to_array(generate_interior_points(e, n, bounds).points);
        },
        py::arg("ellipsoid"), py::arg("n"), py::arg("bounds"));

  py::class_<PlannerConfig>(m, "PlannerConfig")
      .def(py::init<>())
      .def_readwrite("step", &PlannerConfig::step)
      .def_readwrite("rewire_radius", &PlannerConfig::rewire_radius)
      .def_readwrite("max_iterations", &PlannerConfig::max_iterations)
      .def_readwrite("refine_iterations", &PlannerConfig::refine_iterations)
      .def_readwrite("goal_tolerance", &PlannerConfig::goal_tolerance)
      .def_readwrite("horizon", &PlannerConfig::horizon)
      .def_readwrite("d_safe", &PlannerConfig::d_safe)
      .def_readwrite("edge_clearance", &PlannerConfig::edge_clearance)
      .def_readwrite("num_parallel", &PlannerConfig::num_parallel)
      .def_property(
          "sampler_mode", [](const PlannerConfig& c) { return to_string(c.sampler_mode); },
          [](PlannerConfig& c, const std::string& s) { c.sampler_mode = sampler_mode_from_string(s); })
      .def_readwrite("sample_n", &PlannerConfig::sample_n)
      .def_readwrite("grid_res", &PlannerConfig::grid_res)
      .def_readwrite("bounds", &PlannerConfig::bounds)
      .def_readwrite("seed", &PlannerConfig::seed)
      .def("validate", &PlannerConfig::validate);

  m.def("path_cost",
        [](const Points& wps, const Vec3& goal) { return path_cost(from_array(wps), goal); },
        py::arg("waypoints"), py::arg("goal"));
  m.def("plan_rrt_star",
        [](const InstanceMap& map, const Vec3& s, const Vec3& g, const PlannerConfig& cfg) {
          return candidate_dict(plan_rrt_star(map, s, g, cfg));
        },
        py::arg("map"), py::arg("start"), py::arg("goal"), py::arg("config") = PlannerConfig{});
  m.def("plan_a_star",
        [](const InstanceMap& map, const Vec3& s, const Vec3& g, const PlannerConfig& cfg) {
          return candidate_dict(plan_a_star(map, s, g, cfg));
        },
        py::arg("map"), py::arg("start"), py::arg("goal"), py::arg("config") = PlannerConfig{});
  m.def("plan_and_select",
        [](const InstanceMap& map, const Vec3& s, const Vec3& g, const PlannerConfig& cfg) {
          Selection sel;
          {
            py::gil_scoped_release release;
            sel = plan_and_select(map, s, g, cfg);
          }
          py::dict d;
          d["selected"] = candidate_dict(sel.selected);
          py::list all;
          for (const auto& c : sel.all) all.append(candidate_dict(c));
          d["all"] = all;
          d["selected_rank"] = sel.selected_rank;
          d["fallback"] = sel.fallback;
          return d;
        },
        py::arg("map"), py::arg("start"), py::arg("goal"), py::arg("config") = PlannerConfig{});

  py::class_<VehicleParams>(m, "VehicleParams")
      .def(py::init<>())
      .def_readwrite("mass", &VehicleParams::mass)
      .def_readwrite("inertia_diag", &VehicleParams::inertia_diag)
      .def_readwrite("arm", &VehicleParams::arm)
      .def_readwrite("k_v", &VehicleParams::k_v)
      .def_readwrite("k_m", &VehicleParams::k_m)
      .def_readwrite("gravity", &VehicleParams::gravity)
      .def("hover", &VehicleParams::hover);

  m.def("f_continuous", &f_continuous, py::arg("x"), py::arg("u"), py::arg("params") = VehicleParams{});
  m.def("rk4_step", &rk4_step, py::arg("x"), py::arg("u"), py::arg("dt"),
        py::arg("params") = VehicleParams{});

  py::class_<SmootherConfig>(m, "SmootherConfig")
      .def(py::init<>())
      .def_readwrite("v_nom", &SmootherConfig::v_nom)
      .def_readwrite("dt", &SmootherConfig::dt)
      .def_readwrite("q_obstacle", &SmootherConfig::q_obstacle)
      .def_readwrite("d_active", &SmootherConfig::d_active)
      .def_readwrite("max_iter", &SmootherConfig::max_iter);

  m.def("smooth_path",
        [](const Points& wps, const InstanceMap& map, const SmootherConfig& cfg,
           const VehicleParams& vp) {
          const auto pts = from_array(wps);
          if (pts.empty()) throw ValidationError("waypoints", "must not be empty");
          const auto segs = smooth_path(pts, make_state(pts.front()), map, cfg, vp);
          py::list costs, info;
          for (const auto& s : segs) {
            costs.append(s.total_cost);
            py::dict e;
            e["iterations"] = s.iterations;
            e["converged"] = s.converged;
            e["target"] = s.target;
            e["final_state"] = s.states.back();
            e["cost_history"] = s.cost_history;
            info.append(e);
          }
          py::dict d;
          d["segments"] = info;
          d["positions"] = to_array(smoothed_positions(segs));
          d["segment_costs"] = costs;
          return d;
        },
        py::arg("waypoints"), py::arg("map"), py::arg("config") = SmootherConfig{},
        py::arg("params") = VehicleParams{});

  py::class_<BSpline>(m, "BSpline")
      .def_property_readonly("duration", &BSpline::duration)
      .def_property_readonly("control_points",
                             [](const BSpline& s) { return to_array(s.control_points()); })
      .def_property_readonly("knots", &BSpline::knots)
      .def("sample", [](const BSpline& s, double t) {
        const auto r = s.sample(t);
        return py::make_tuple(r.position, r.velocity, r.acceleration);
      }, py::arg("t"));
  m.def("fit_bspline", [](const Points& wps, double speed) { return fit_bspline(from_array(wps), speed); },
        py::arg("waypoints"), py::arg("speed") = 1.5);

  m.def("default_scenario_yaml", [] { return scenario_to_yaml(default_scenario()); });
  m.def("run_mission_yaml",
        [](const std::string& yaml) {
          const ScenarioSpec spec = parse_scenario_text(yaml);
          const PointCloud world = load_world(spec);
          py::gil_scoped_release release;
          return mission_log_json(run_mission(world, make_state(spec.start), spec.goal, spec.setup));
        },
        py::arg("scenario_yaml"),
        "Runs a mission from scenario YAML text and returns the JSON log.");
  m.def("run_benchmark_yaml",
        [](const std::string& yaml, int worlds, const std::string& planner) {
          const ScenarioSpec spec = parse_scenario_text(yaml);
          BenchResult r;
          {
            py::gil_scoped_release release;
            r = run_benchmark(worlds, spec, planner);
          }
          std::ostringstream csv;
          write_bench_csv(csv, r);
          return py::make_tuple(csv.str(), bench_summary_json(r));
        },
        py::arg("scenario_yaml"), py::arg("worlds"), py::arg("planner") = "",
        "Returns (csv, summary_json).");
}
