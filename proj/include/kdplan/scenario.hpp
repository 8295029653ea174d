#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "kdplan/mission.hpp"

namespace kdplan {

struct BenchSettings {
  int worlds = 100;
  int map_scans = 10;     // instance-map builds timed per world
  int phase_worlds = 10;  // worlds that also run the full pipeline for the phase breakdown
};

// Everything one run needs. The world is either generated (`world`) or
// read from `cloud_file`; exactly one of them is set after parsing.
struct ScenarioSpec {
  std::uint64_t seed = 1;
  std::optional<WorldSpec> world;
  std::filesystem::path cloud_file;
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  MissionSetup setup;
  BenchSettings bench;
};

// YAML scenario file. Omitted fields take their documented defaults;
// unknown keys are rejected. Throws ParseError (malformed / wrong type) or
// ValidationError (out of range), both naming the offending key.
ScenarioSpec parse_scenario(const std::filesystem::path& file);
ScenarioSpec parse_scenario_text(const std::string& yaml,
                                 const std::filesystem::path& base_dir = {});

// Complete YAML rendering of a spec (every field, defaults included).
std::string scenario_to_yaml(const ScenarioSpec& spec);

// 50 obstacles in a 20 m cube, start (5,10,10), goal (15,10,10).
ScenarioSpec default_scenario();

PointCloud load_world(const ScenarioSpec& spec);

}  // namespace kdplan
