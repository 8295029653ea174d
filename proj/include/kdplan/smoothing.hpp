#pragma once

#include <span>
#include <vector>

#include "kdplan/dynamics.hpp"
#include "kdplan/spatial_map.hpp"

namespace kdplan {

using StateWeights = Eigen::Matrix<double, kStateDim, 1>;
using ControlWeights = Eigen::Matrix<double, kControlDim, 1>;

// Diagonal stage weights: position, velocity, orientation, body rate.
StateWeights make_state_weights(double pos, double vel, double att, double rate);

struct SmootherConfig {
  // Horizon steps per segment. 0 derives it from the segment length:
  // ceil(length / (v_nom * dt)), clamped to [min_steps, max_steps].
  int steps = 0;
  int min_steps = 10;
  int max_steps = 400;
  double v_nom = 1.5;
  double dt = 0.05;
  StateWeights q_stage = make_state_weights(1.0, 0.1, 0.01, 0.01);
  StateWeights q_final = 50.0 * make_state_weights(1.0, 0.1, 0.01, 0.01);
  ControlWeights r_ctrl = ControlWeights::Constant(0.1);
  double q_obstacle = 50.0;  // obstacle scale q
  double d_active = 0.5;     // obstacles with signed distance above this are ignored (m)
  int max_iter = 100;
  double cost_tol = 1e-6;    // relative cost change that counts as converged
  double reg0 = 1e-6;
  double reg_max = 1e10;

  void validate() const;
  int steps_for(double length) const;
};

struct TrajectorySegment {
  std::vector<State> states;      // x_0 .. x_N
  std::vector<Control> controls;  // u_0 .. u_{N-1}
  double dt = 0.0;
  double total_cost = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_history;  // initial cost, then every accepted iterate
  Vec3 target = Vec3::Zero();
};

// Quadratic tracking cost plus q * sum(exp(-d_i)) over indexed points within
// d_active (signed distance) of the position.
double stage_cost(const State& x, const Control& u, const State& x_ref, const Control& u_ref,
                  const InstanceMap& map, const SmootherConfig& cfg);

double obstacle_cost(const Vec3& p, const InstanceMap& map, const SmootherConfig& cfg);

// Analytic gradient and outer-product (PSD) Hessian of obstacle_cost.
struct ObstacleQuadratic {
  double value = 0.0;
  Vec3 gradient = Vec3::Zero();
  Mat3 hessian = Mat3::Zero();
};
ObstacleQuadratic obstacle_quadratic(const Vec3& p, const InstanceMap& map,
                                     const SmootherConfig& cfg);

// Rollout of a control sequence from x0.
std::vector<State> rollout(const State& x0, std::span<const Control> controls, double dt,
                           const VehicleParams& params);

// Finite-horizon iLQR from x0 toward rest at p_goal. Throws RiccatiFailure.
TrajectorySegment ilqr_segment(const State& x0, const Vec3& p_goal, const InstanceMap& map,
                               const SmootherConfig& cfg, const VehicleParams& params);

// Midpoint chaining over consecutive waypoint triples; each segment starts
// at the terminal state of its predecessor.
std::vector<TrajectorySegment> smooth_path(std::span<const Vec3> waypoints, const State& x_start,
                                           const InstanceMap& map, const SmootherConfig& cfg,
                                           const VehicleParams& params);

// Segment targets smooth_path aims for, in order.
std::vector<Vec3> smoothing_targets(std::span<const Vec3> waypoints);

// Positions of all segments in order, junction states emitted once.
std::vector<Vec3> smoothed_positions(std::span<const TrajectorySegment> segments);

}  // namespace kdplan
