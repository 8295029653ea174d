#include "kdplan/smoothing.hpp"

#include <cmath>

#include "kdplan/riccati.hpp"

namespace kdplan {

StateWeights make_state_weights(double pos, double vel, double att, double rate) {
  StateWeights w;
  w << Vec3::Constant(pos), Vec3::Constant(vel), Vec3::Constant(att), Vec3::Constant(rate);
  return w;
}

void SmootherConfig::validate() const {
  if (steps < 0) throw ValidationError("steps", "must be >= 0 (0 = derive from length)");
  if (min_steps < 1) throw ValidationError("min_steps", "must be >= 1");
  if (max_steps < min_steps) throw ValidationError("max_steps", "must be >= min_steps");
  if (!(v_nom > 0.0)) throw ValidationError("v_nom", "must be > 0");
  if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
  if (!(q_stage.array() >= 0.0).all()) throw ValidationError("q_stage", "must be >= 0");
  if (!(q_final.array() >= 0.0).all()) throw ValidationError("q_final", "must be >= 0");
  if (!(r_ctrl.array() > 0.0).all()) throw ValidationError("r_ctrl", "must be > 0");
  if (!(q_obstacle >= 0.0)) throw ValidationError("q", "must be >= 0");
  if (!(d_active >= 0.0)) throw ValidationError("d_active", "must be >= 0");
  if (max_iter < 1) throw ValidationError("max_iter", "must be >= 1");
  if (!(cost_tol > 0.0)) throw ValidationError("cost_tol", "must be > 0");
  if (!(reg0 > 0.0)) throw ValidationError("reg0", "must be > 0");
  if (!(reg_max > reg0)) throw ValidationError("reg_max", "must exceed reg0");
}

int SmootherConfig::steps_for(double length) const {
  if (steps > 0) return steps;
  const auto n = static_cast<int>(std::ceil(length / (v_nom * dt)));
  return std::clamp(n, min_steps, max_steps);
}

double obstacle_cost(const Vec3& p, const InstanceMap& map, const SmootherConfig& cfg) {
  if (cfg.q_obstacle == 0.0 || map.empty()) return 0.0;
  double sum = 0.0;
  map.for_each_within(p, cfg.d_active + map.inflation(), [&](const Vec3&, double dist) {
    sum += std::exp(-(dist - map.inflation()));
  });
  return cfg.q_obstacle * sum;
}

ObstacleQuadratic obstacle_quadratic(const Vec3& p, const InstanceMap& map,
                                     const SmootherConfig& cfg) {
  ObstacleQuadratic out;
  if (cfg.q_obstacle == 0.0 || map.empty()) return out;
  map.for_each_within(p, cfg.d_active + map.inflation(), [&](const Vec3& q, double dist) {
    const double e = cfg.q_obstacle * std::exp(-(dist - map.inflation()));
    out.value += e;
    if (dist <= 0.0) return;  // direction undefined on the point itself
    const Vec3 n = (p - q) / dist;
    out.gradient -= e * n;
    out.hessian += e * n * n.transpose();
  });
  return out;
}

double stage_cost(const State& x, const Control& u, const State& x_ref, const Control& u_ref,
                  const InstanceMap& map, const SmootherConfig& cfg) {
  const State dx = x - x_ref;
  const Control du = u - u_ref;
  return dx.dot(cfg.q_stage.cwiseProduct(dx)) + du.dot(cfg.r_ctrl.cwiseProduct(du)) +
         obstacle_cost(position(x), map, cfg);
}

std::vector<State> rollout(const State& x0, std::span<const Control> controls, double dt,
                           const VehicleParams& params) {
  std::vector<State> xs;
  xs.reserve(controls.size() + 1);
  xs.push_back(x0);
  for (const auto& u : controls) xs.push_back(rk4_step(xs.back(), u, dt, params));
  return xs;
}

namespace {

struct Problem {
  const InstanceMap& map;
  const SmootherConfig& cfg;
  State x_ref;
  Control u_ref;

  double terminal_cost(const State& x) const {
    const State dx = x - x_ref;
    return dx.dot(cfg.q_final.cwiseProduct(dx)) + obstacle_cost(position(x), map, cfg);
  }

  double total(const std::vector<State>& xs, const std::vector<Control>& us) const {
    double j = 0.0;
    for (std::size_t k = 0; k < us.size(); ++k) j += stage_cost(xs[k], us[k], x_ref, u_ref, map, cfg);
    return j + terminal_cost(xs.back());
  }
};

}  // namespace

TrajectorySegment ilqr_segment(const State& x0, const Vec3& p_goal, const InstanceMap& map,
                               const SmootherConfig& cfg, const VehicleParams& params) {
  cfg.validate();
  params.validate();
  if (!x0.allFinite() || !p_goal.allFinite())
    throw std::invalid_argument("ilqr_segment needs finite start state and goal");

  const int N = cfg.steps_for((p_goal - position(x0)).norm());
  Problem prob{map, cfg, make_state(p_goal), params.hover()};

  std::vector<Control> us(static_cast<std::size_t>(N), params.hover());
  std::vector<State> xs = rollout(x0, us, cfg.dt, params);
  double J = prob.total(xs, us);

  TrajectorySegment seg;
  seg.dt = cfg.dt;
  seg.target = p_goal;
  seg.cost_history.push_back(J);

  constexpr double kAbsTol = 1e-12;
  double mu = cfg.reg0;
  int accepted = 0;
  bool converged = false;
  int iter = 0;

  std::vector<LqStage> stages(static_cast<std::size_t>(N));
  LqTerminal terminal;

  while (iter < cfg.max_iter && !converged) {
    ++iter;
    // Quadratize the cost and linearize the dynamics along (xs, us).
    for (int k = 0; k < N; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      const LinearizedDynamics lin = linearize(xs[kk], us[kk], cfg.dt, params);
      const ObstacleQuadratic obs = obstacle_quadratic(position(xs[kk]), map, cfg);
      LqStage& s = stages[kk];
      s.A = lin.A;
      s.B = lin.B;
      const State dx = xs[kk] - prob.x_ref;
      const Control du = us[kk] - prob.u_ref;
      s.l_x = 2.0 * cfg.q_stage.cwiseProduct(dx);
      s.l_x.head<3>() += obs.gradient;
      s.l_xx = (2.0 * cfg.q_stage).asDiagonal();
      s.l_xx.topLeftCorner<3, 3>() += obs.hessian;
      s.l_u = 2.0 * cfg.r_ctrl.cwiseProduct(du);
      s.l_uu = (2.0 * cfg.r_ctrl).asDiagonal();
      s.l_ux = Eigen::MatrixXd::Zero(kControlDim, kStateDim);
    }
    {
      const ObstacleQuadratic obs = obstacle_quadratic(position(xs.back()), map, cfg);
      const State dx = xs.back() - prob.x_ref;
      terminal.l_x = 2.0 * cfg.q_final.cwiseProduct(dx);
      terminal.l_x.head<3>() += obs.gradient;
      terminal.l_xx = (2.0 * cfg.q_final).asDiagonal();
      terminal.l_xx.topLeftCorner<3, 3>() += obs.hessian;
    }

    bool stepped = false;
    while (!stepped) {
      const auto bp = riccati_backward_pass(stages, terminal, mu);
      if (!bp) {
        mu *= 10.0;
        if (mu > cfg.reg_max) break;
        continue;
      }

      const double expected = -(bp->d1 + bp->d2);
      if (expected < kAbsTol + cfg.cost_tol * std::abs(J)) {
        converged = true;
        break;
      }

      for (double alpha = 1.0; alpha >= 1.0 / 64.0; alpha *= 0.5) {
        std::vector<State> xn(xs.size());
        std::vector<Control> un(us.size());
        xn[0] = x0;
        bool finite = true;
        for (int k = 0; k < N; ++k) {
          const auto kk = static_cast<std::size_t>(k);
          un[kk] = us[kk] + alpha * bp->k[kk] + bp->K[kk] * (xn[kk] - xs[kk]);
          xn[kk + 1] = rk4_step(xn[kk], un[kk], cfg.dt, params);
          if (!xn[kk + 1].allFinite()) {
            finite = false;
            break;
          }
        }
        if (!finite) continue;
        const double Jn = prob.total(xn, un);
        if (Jn < J) {
          const double rel = (J - Jn) / std::max(std::abs(J), kAbsTol);
          xs = std::move(xn);
          us = std::move(un);
          J = Jn;
          seg.cost_history.push_back(J);
          ++accepted;
          stepped = true;
          mu = std::max(mu / 10.0, cfg.reg0);
          if (rel < cfg.cost_tol) converged = true;
          break;
        }
      }
      if (!stepped) {
        mu *= 10.0;
        if (mu > cfg.reg_max) break;
      }
    }
    if (!stepped && !converged) {
      if (accepted == 0)
        throw RiccatiFailure("iLQR regularization exceeded " + std::to_string(cfg.reg_max) +
                             " without a cost-decreasing step");
      break;  // stalled after progress: keep the best iterate
    }
  }

  seg.states = std::move(xs);
  seg.controls = std::move(us);
  seg.total_cost = J;
  seg.iterations = iter;
  seg.converged = converged;
  return seg;
}

std::vector<Vec3> smoothing_targets(std::span<const Vec3> waypoints) {
  if (waypoints.empty()) throw std::invalid_argument("smooth_path needs at least one waypoint");
  const std::size_t M = waypoints.size();
  if (M <= 2) return {waypoints.back()};
  std::vector<Vec3> targets;
  targets.push_back(0.5 * (waypoints[0] + waypoints[1]));
  for (std::size_t m = 0; m + 2 < M; ++m)
    targets.push_back(0.5 * (waypoints[m + 1] + waypoints[m + 2]));
  targets.push_back(waypoints.back());
  return targets;
}

std::vector<TrajectorySegment> smooth_path(std::span<const Vec3> waypoints, const State& x_start,
                                           const InstanceMap& map, const SmootherConfig& cfg,
                                           const VehicleParams& params) {
  const auto targets = smoothing_targets(waypoints);
  std::vector<TrajectorySegment> segments;
  segments.reserve(targets.size());
  State x = x_start;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    try {
      segments.push_back(ilqr_segment(x, targets[i], map, cfg, params));
    } catch (const RiccatiFailure& e) {
      throw RiccatiFailure(std::string("segment ") + std::to_string(i) + ": " + e.what(),
                           static_cast<int>(i));
    }
    x = segments.back().states.back();
  }
  return segments;
}

std::vector<Vec3> smoothed_positions(std::span<const TrajectorySegment> segments) {
  std::vector<Vec3> out;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& st = segments[s].states;
    for (std::size_t k = (s == 0 ? 0 : 1); k < st.size(); ++k) out.push_back(position(st[k]));
  }
  return out;
}

}  // namespace kdplan
