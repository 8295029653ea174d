#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "kdplan/smoothing.hpp"
#include "kdplan/spatial_map.hpp"
#include "kdplan/trajectory.hpp"

namespace kdplan {

// Point-cloud / waypoint text format: one "x y z" triple per line. Blank
// lines and lines starting with '#' are skipped. Throws ParseError with the
// line number on malformed input.
std::vector<Vec3> read_points(std::istream& in);
std::vector<Vec3> read_points(const std::filesystem::path& file);
void write_points(std::ostream& out, std::span<const Vec3> points);
void write_points(const std::filesystem::path& file, std::span<const Vec3> points);

inline PointCloud read_point_cloud(const std::filesystem::path& file) {
  return PointCloud{read_points(file)};
}

// Time-stamped rows "t x y z vx vy vz".
void write_trajectory_rows(std::ostream& out, std::span<const TrajectorySegment> segments);
void write_trajectory_rows(std::ostream& out, const BSpline& spline, double dt);

}  // namespace kdplan
