#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kdplan/dynamics.hpp"
#include "kdplan/planners.hpp"
#include "kdplan/smoothing.hpp"
#include "kdplan/spatial_map.hpp"

namespace kdplan {

enum class MissionState { Wait, Gen, Exec };

enum class MissionEvent {
  HaveGoal,
  NoGoal,
  PlanSuccess,
  PlanNotSuccess,
  PlanCannotBeFound,
  InProgress,
  CollisionDetected,
  SuddenChange,
  GoalReached,
};

std::string to_string(MissionState s);
std::string to_string(MissionEvent e);

// Total transition function of the replanning state machine. Pairs without
// an edge leave the state unchanged.
MissionState transition(MissionState state, MissionEvent event);

struct Odometry {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double yaw = 0.0;
  double timestamp = 0.0;
};

struct PdGains {
  Vec3 kp = Vec3::Constant(1.2);
  Vec3 kd = Vec3::Constant(0.3);
  double kp_yaw = 0.8;
};

struct VelocityCommand {
  Vec3 velocity = Vec3::Zero();
  double yaw = 0.0;
};

// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

VelocityCommand pd_command(const Odometry& actual, const Odometry& desired, const PdGains& gains);

struct MissionConfig {
  double tick = 0.05;            // s
  double tau = 0.2;              // velocity response time constant of the plant (s)
  PdGains gains;
  double map_radius = 4.0;       // instance map radius around the vehicle (m)
  double inflation = 0.3;        // (m)
  double lookahead = 2.0;        // collision look-ahead window (s)
  double lookahead_step = 0.1;   // (s)
  double goal_tolerance = 0.3;   // (m)
  int max_ticks = 6000;
  double speed = 1.5;            // spline time law (m/s)
  double tracking_slack = 0.2;   // (m)
  int max_plan_attempts = 3;     // PlanNotSuccess retries before giving up on an episode
  int max_plan_failures = 5;     // consecutive failed episodes before the mission aborts
  std::vector<int> sudden_change_ticks;  // scripted sensor interruptions

  void validate() const;
};

enum class MissionOutcome { GoalReached, GoalOccupied, PlanningFailed, Timeout };
std::string to_string(MissionOutcome o);

struct LoggedEvent {
  int tick = 0;
  MissionEvent event{};
  MissionState from{};
  MissionState to{};
};

struct PlanEpisode {
  int tick = 0;
  int attempt = 0;
  std::uint64_t seed = 0;
  std::uint64_t plan_snapshot = 0;
  std::uint64_t smooth_snapshot = 0;
  std::uint64_t check_snapshot = 0;
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();      // effective goal of this episode
  bool success = false;
  std::string failure;
  std::vector<Vec3> waypoints;   // selected candidate
  double path_length = 0.0;
  double cost = 0.0;
  double min_clearance = kInf;
  std::size_t candidates = 0;
  std::size_t selected_rank = 0;
  std::vector<Vec3> smoothed;    // smoothed positions (spline control points)
  double duration = 0.0;
};

struct MissionLog {
  MissionOutcome outcome = MissionOutcome::Timeout;
  std::string reason;
  int ticks = 0;
  int replans = 0;               // collision-triggered Exec -> Gen transitions
  double min_clearance = kInf;   // over executed positions, against the full world
  std::vector<LoggedEvent> events;
  std::vector<MissionState> state_trace;  // consecutive duplicates collapsed
  std::vector<double> times;
  std::vector<Vec3> executed;
  std::vector<PlanEpisode> episodes;

  int gen_episodes() const;
};

struct MissionSetup {
  PlannerConfig planner;
  SmootherConfig smoother;
  VehicleParams vehicle;
  MissionConfig mission;
};

// Closed-loop replanning simulation. Never throws for mission-level
// failures: those are reported through `outcome` and `reason`.
MissionLog run_mission(const PointCloud& world, const State& start, const Vec3& goal,
                       const MissionSetup& setup);

// JSON document with the full log. Byte-stable for identical logs.
std::string mission_log_json(const MissionLog& log);

}  // namespace kdplan
