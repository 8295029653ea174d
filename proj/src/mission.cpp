#include "kdplan/mission.hpp"

#include <cmath>
#include <json.hpp>
#include <numbers>
#include <optional>

#include "kdplan/trajectory.hpp"

namespace kdplan {

std::string to_string(MissionState s) {
  switch (s) {
    case MissionState::Wait: return "Wait";
    case MissionState::Gen: return "Gen";
    case MissionState::Exec: return "Exec";
  }
  return "?";
}

std::string to_string(MissionEvent e) {
  switch (e) {
    case MissionEvent::HaveGoal: return "HaveGoal";
    case MissionEvent::NoGoal: return "NoGoal";
    case MissionEvent::PlanSuccess: return "PlanSuccess";
    case MissionEvent::PlanNotSuccess: return "PlanNotSuccess";
    case MissionEvent::PlanCannotBeFound: return "PlanCannotBeFound";
    case MissionEvent::InProgress: return "InProgress";
    case MissionEvent::CollisionDetected: return "CollisionDetected";
    case MissionEvent::SuddenChange: return "SuddenChange";
    case MissionEvent::GoalReached: return "GoalReached";
  }
  return "?";
}

std::string to_string(MissionOutcome o) {
  switch (o) {
    case MissionOutcome::GoalReached: return "goal_reached";
    case MissionOutcome::GoalOccupied: return "goal_occupied";
    case MissionOutcome::PlanningFailed: return "planning_failed";
    case MissionOutcome::Timeout: return "timeout";
  }
  return "?";
}

MissionState transition(MissionState state, MissionEvent event) {
  using S = MissionState;
  using E = MissionEvent;
  switch (state) {
    case S::Wait:
      if (event == E::HaveGoal) return S::Gen;
      return S::Wait;  // NoGoal and unmatched events
    case S::Gen:
      if (event == E::PlanSuccess) return S::Exec;
      if (event == E::PlanCannotBeFound) return S::Wait;
      return S::Gen;  // PlanNotSuccess retries
    case S::Exec:
      if (event == E::CollisionDetected) return S::Gen;
      if (event == E::SuddenChange || event == E::GoalReached) return S::Wait;
      return S::Exec;
  }
  return state;
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

VelocityCommand pd_command(const Odometry& actual, const Odometry& desired, const PdGains& gains) {
  VelocityCommand cmd;
  cmd.velocity = desired.velocity +
                 gains.kp.cwiseProduct(desired.position - actual.position) +
                 gains.kd.cwiseProduct(desired.velocity - actual.velocity);
  cmd.yaw = desired.yaw + gains.kp_yaw * wrap_angle(desired.yaw - actual.yaw);
  return cmd;
}

void MissionConfig::validate() const {
  if (!(tick > 0.0)) throw ValidationError("tick", "must be > 0");
  if (!(tau > 0.0)) throw ValidationError("tau", "must be > 0");
  if (!(gains.kp.array() >= 0.0).all()) throw ValidationError("kp", "must be >= 0");
  if (!(gains.kd.array() >= 0.0).all()) throw ValidationError("kd", "must be >= 0");
  if (!(gains.kp_yaw >= 0.0)) throw ValidationError("kp_yaw", "must be >= 0");
  if (!(map_radius > 0.0)) throw ValidationError("map_radius", "must be > 0");
  if (!(inflation >= 0.0)) throw ValidationError("inflation", "must be >= 0");
  if (!(lookahead >= 0.0)) throw ValidationError("lookahead", "must be >= 0");
  if (!(lookahead_step > 0.0)) throw ValidationError("lookahead_step", "must be > 0");
  if (!(goal_tolerance > 0.0)) throw ValidationError("goal_tolerance", "must be > 0");
  if (max_ticks < 1) throw ValidationError("max_ticks", "must be >= 1");
  if (!(speed > 0.0)) throw ValidationError("speed", "must be > 0");
  if (!(tracking_slack >= 0.0)) throw ValidationError("tracking_slack", "must be >= 0");
  if (max_plan_attempts < 1) throw ValidationError("max_plan_attempts", "must be >= 1");
  if (max_plan_failures < 1) throw ValidationError("max_plan_failures", "must be >= 1");
}

int MissionLog::gen_episodes() const {
  int n = 0;
  for (auto s : state_trace)
    if (s == MissionState::Gen) ++n;
  return n;
}

namespace {

struct ActivePlan {
  BSpline spline;
  Vec3 end = Vec3::Zero();
  bool final_leg = false;
  double started = 0.0;
  double last_yaw = 0.0;
};

double min_clearance_on(const BSpline& s, const InstanceMap& map, double t0, double t1,
                        double step) {
  double best = kInf;
  if (map.empty()) return best;
  t0 = std::clamp(t0, 0.0, s.duration());
  t1 = std::clamp(t1, 0.0, s.duration());
  for (double t = t0;; t += step) {
    const double tt = std::min(t, t1);
    best = std::min(best, map.signed_distance(s.position(tt)));
    if (tt >= t1) break;
  }
  return best;
}

}  // namespace

MissionLog run_mission(const PointCloud& world, const State& start, const Vec3& goal,
                       const MissionSetup& setup) {
  const MissionConfig& mc = setup.mission;
  mc.validate();
  setup.planner.validate();
  setup.smoother.validate();
  setup.vehicle.validate();

  MissionLog log;
  const InstanceMap global_map = build_instance_map(world, Vec3::Zero(), kInf, mc.inflation);
  MapBuffer buffer;

  MissionState state = MissionState::Wait;
  log.state_trace.push_back(state);

  Vec3 p = position(start);
  Vec3 v = velocity(start);
  double yaw = 0.0;
  std::optional<ActivePlan> plan;
  int attempts = 0;
  int consecutive_failures = 0;
  std::uint64_t episode_counter = 0;
  bool done = false;

  auto fire = [&](int tick, MissionEvent e) {
    const MissionState next = transition(state, e);
    log.events.push_back({tick, e, state, next});
    if (state == MissionState::Exec && e == MissionEvent::CollisionDetected) ++log.replans;
    state = next;
    if (log.state_trace.back() != state) log.state_trace.push_back(state);
  };

  int tick = 0;
  for (; tick < mc.max_ticks && !done; ++tick) {
    const double t = tick * mc.tick;

    buffer.rebuild(world, p, mc.map_radius, mc.inflation);
    const auto snap = buffer.snapshot();

    log.times.push_back(t);
    log.executed.push_back(p);
    log.min_clearance = std::min(log.min_clearance, global_map.signed_distance(p));

    VelocityCommand cmd;  // zero: hold position
    cmd.yaw = yaw;

    const bool interrupted =
        std::find(mc.sudden_change_ticks.begin(), mc.sudden_change_ticks.end(), tick) !=
        mc.sudden_change_ticks.end();

    switch (state) {
      case MissionState::Wait: {
        const bool goal_ok = setup.planner.bounds.contains(goal) &&
                             global_map.signed_distance(goal) >= setup.planner.d_safe;
        if (!goal_ok) {
          fire(tick, MissionEvent::NoGoal);
          log.outcome = MissionOutcome::GoalOccupied;
          log.reason = "goal occupied or outside the map";
          done = true;
        } else {
          fire(tick, MissionEvent::HaveGoal);
          attempts = 0;
        }
        break;
      }

      case MissionState::Gen: {
        PlanEpisode ep;
        ep.tick = tick;
        ep.attempt = attempts;
        ep.start = p;
        ep.seed = derive_seed(setup.planner.seed, episode_counter++);
        ep.plan_snapshot = snap->generation();
        std::optional<MissionEvent> outcome;
        try {
          PlannerConfig pc = setup.planner;
          pc.seed = ep.seed;
          const SearchSetup search = prepare_search(*snap, p, goal, pc);
          ep.goal = search.goal;
          const Selection sel = plan_and_select(*snap, search, pc);
          ep.waypoints = sel.selected.waypoints;
          ep.path_length = path_length(ep.waypoints);
          ep.cost = sel.selected.cost;
          ep.min_clearance = sel.selected.min_clearance;
          ep.candidates = sel.all.size();
          ep.selected_rank = sel.selected_rank;

          ep.smooth_snapshot = snap->generation();
          const auto segments =
              smooth_path(ep.waypoints, make_state(p, v), *snap, setup.smoother, setup.vehicle);
          ep.smoothed = smoothed_positions(segments);
          if (ep.smoothed.size() < 2) ep.smoothed.push_back(ep.smoothed.back());
          BSpline spline = fit_bspline(ep.smoothed, mc.speed);
          ep.duration = spline.duration();

          ep.check_snapshot = snap->generation();
          const double clear =
              min_clearance_on(spline, *snap, 0.0, spline.duration(), mc.lookahead_step);
          if (clear < setup.planner.d_safe) {
            ep.failure = "smoothed trajectory violates d_safe";
            outcome = MissionEvent::PlanNotSuccess;
          } else {
            ep.success = true;
            const Vec3 end = spline.position(spline.duration());
            plan = ActivePlan{std::move(spline), end,
                              (search.goal - goal).norm() <= mc.goal_tolerance, t + mc.tick,
                              yaw};
            outcome = MissionEvent::PlanSuccess;
          }
        } catch (const RiccatiFailure& e) {
          ep.failure = e.what();
          outcome = MissionEvent::PlanNotSuccess;
        } catch (const AllPlannersFailed& e) {
          ep.failure = e.what();
          outcome = MissionEvent::PlanCannotBeFound;
        } catch (const NoFreeIntermediateGoal& e) {
          ep.failure = e.what();
          outcome = MissionEvent::PlanCannotBeFound;
        } catch (const PathNotFound& e) {
          ep.failure = e.what();
          outcome = MissionEvent::PlanCannotBeFound;
        }
        if (*outcome == MissionEvent::PlanNotSuccess && ++attempts >= mc.max_plan_attempts)
          outcome = MissionEvent::PlanCannotBeFound;
        log.episodes.push_back(std::move(ep));

        fire(tick, *outcome);
        if (*outcome == MissionEvent::PlanSuccess) {
          consecutive_failures = 0;
        } else if (*outcome == MissionEvent::PlanCannotBeFound) {
          if (++consecutive_failures >= mc.max_plan_failures) {
            log.outcome = MissionOutcome::PlanningFailed;
            log.reason = "no plan found in " + std::to_string(consecutive_failures) + " episodes";
            done = true;
          }
        }
        break;
      }

      case MissionState::Exec: {
        const ActivePlan& ap = *plan;
        const double te = std::max(0.0, t - ap.started);
        const double dur = ap.spline.duration();

        if (interrupted) {
          fire(tick, MissionEvent::SuddenChange);
          plan.reset();
          break;
        }
        if (te >= dur && (p - ap.end).norm() <= mc.goal_tolerance) {
          fire(tick, MissionEvent::GoalReached);
          if (ap.final_leg) {
            log.outcome = MissionOutcome::GoalReached;
            log.reason = "goal reached";
            done = true;
          }
          plan.reset();
          break;
        }
        if (te < dur &&
            min_clearance_on(ap.spline, *snap, te, te + mc.lookahead, mc.lookahead_step) <
                setup.planner.d_safe) {
          fire(tick, MissionEvent::CollisionDetected);
          plan.reset();
          break;
        }
        fire(tick, MissionEvent::InProgress);

        const TrajectorySample ds = ap.spline.sample(std::min(te, dur));
        Odometry desired{ds.position, te < dur ? ds.velocity : Vec3::Zero(), plan->last_yaw, t};
        if (desired.velocity.head<2>().norm() > 0.1)
          desired.yaw = std::atan2(desired.velocity.y(), desired.velocity.x());
        plan->last_yaw = desired.yaw;
        cmd = pd_command(Odometry{p, v, yaw, t}, desired, mc.gains);
        break;
      }
    }

    // First-order velocity-command plant.
    const double a = mc.tick / mc.tau;
    v += std::min(1.0, a) * (cmd.velocity - v);
    p += v * mc.tick;
    yaw = wrap_angle(yaw + std::min(1.0, a) * wrap_angle(cmd.yaw - yaw));
  }

  log.ticks = tick;
  if (!done) {
    log.outcome = MissionOutcome::Timeout;
    log.reason = "tick limit reached";
  }
  return log;
}

namespace {

nlohmann::ordered_json vec_json(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

nlohmann::ordered_json points_json(const std::vector<Vec3>& pts) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : pts) arr.push_back(vec_json(p));
  return arr;
}

nlohmann::ordered_json number_or_inf(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace

std::string mission_log_json(const MissionLog& log) {
  nlohmann::ordered_json j;
  j["outcome"] = to_string(log.outcome);
  j["reason"] = log.reason;
  j["ticks"] = log.ticks;
  j["replans"] = log.replans;
  j["gen_episodes"] = log.gen_episodes();
  j["min_clearance"] = number_or_inf(log.min_clearance);

  auto trace = nlohmann::ordered_json::array();
  for (auto s : log.state_trace) trace.push_back(to_string(s));
  j["state_trace"] = trace;

  auto events = nlohmann::ordered_json::array();
  for (const auto& e : log.events)
    events.push_back({{"tick", e.tick}, {"event", to_string(e.event)},
                      {"from", to_string(e.from)}, {"to", to_string(e.to)}});
  j["events"] = events;

  auto episodes = nlohmann::ordered_json::array();
  for (const auto& ep : log.episodes) {
    nlohmann::ordered_json e;
    e["tick"] = ep.tick;
    e["attempt"] = ep.attempt;
    e["seed"] = ep.seed;
    e["plan_snapshot"] = ep.plan_snapshot;
    e["smooth_snapshot"] = ep.smooth_snapshot;
    e["check_snapshot"] = ep.check_snapshot;
    e["success"] = ep.success;
    e["failure"] = ep.failure;
    e["start"] = vec_json(ep.start);
    e["goal"] = vec_json(ep.goal);
    e["path_length"] = ep.path_length;
    e["cost"] = ep.cost;
    e["min_clearance"] = number_or_inf(ep.min_clearance);
    e["candidates"] = ep.candidates;
    e["selected_rank"] = ep.selected_rank;
    e["duration"] = ep.duration;
    e["waypoints"] = points_json(ep.waypoints);
    e["smoothed"] = points_json(ep.smoothed);
    episodes.push_back(std::move(e));
  }
  j["episodes"] = episodes;

  auto executed = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < log.executed.size(); ++i) {
    const auto& p = log.executed[i];
    executed.push_back({log.times[i], p.x(), p.y(), p.z()});
  }
  j["executed"] = executed;
  return j.dump(2);
}

}  // namespace kdplan
