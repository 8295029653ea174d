#include "kdplan/text_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace kdplan {

std::vector<Vec3> read_points(std::istream& in) {
  std::vector<Vec3> pts;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    ss.imbue(std::locale::classic());
    double x, y, z;
    std::string extra;
    if (!(ss >> x >> y >> z) || (ss >> extra))
      throw ParseError("line " + std::to_string(line_no) + ": expected 'x y z', got '" + line + "'");
    const Vec3 p(x, y, z);
    if (!p.allFinite()) throw ParseError("line " + std::to_string(line_no) + ": non-finite coordinate");
    pts.push_back(p);
  }
  return pts;
}

std::vector<Vec3> read_points(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError("cannot open " + file.string());
  return read_points(in);
}

namespace {

// Shortest round-trip representation, independent of the global locale.
std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_points(std::ostream& out, std::span<const Vec3> points) {
  for (const auto& p : points) out << fmt(p.x()) << ' ' << fmt(p.y()) << ' ' << fmt(p.z()) << '\n';
}

void write_points(const std::filesystem::path& file, std::span<const Vec3> points) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  write_points(out, points);
}

void write_trajectory_rows(std::ostream& out, std::span<const TrajectorySegment> segments) {
  out << "# t x y z vx vy vz\n";
  double t0 = 0.0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const auto& seg = segments[s];
    for (std::size_t k = (s == 0 ? 0 : 1); k < seg.states.size(); ++k) {
      const State& x = seg.states[k];
      out << fmt(t0 + k * seg.dt);
      for (int i = 0; i < 6; ++i) out << ' ' << fmt(x(i));
      out << '\n';
    }
    t0 += seg.dt * static_cast<double>(seg.states.size() - 1);
  }
}

void write_trajectory_rows(std::ostream& out, const BSpline& spline, double dt) {
  out << "# t x y z vx vy vz\n";
  const double dur = spline.duration();
  const int n = dur > 0.0 ? static_cast<int>(std::ceil(dur / dt)) : 0;
  for (int i = 0; i <= n; ++i) {
    const double t = std::min(dur, i * dt);
    const auto s = spline.sample(t);
    out << fmt(t);
    for (int a = 0; a < 3; ++a) out << ' ' << fmt(s.position[a]);
    for (int a = 0; a < 3; ++a) out << ' ' << fmt(s.velocity[a]);
    out << '\n';
  }
}

}  // namespace kdplan
