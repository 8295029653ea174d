#include <array>
#include <cmath>
#include <cstdint>
#include <queue>
#include <tuple>

#include "kdplan/planners.hpp"

namespace kdplan {

namespace {

constexpr std::int64_t kMaxCells = 64'000'000;

struct Lattice {
  Vec3 origin;
  double res;
  std::array<std::int64_t, 3> dims;

  std::int64_t index(std::int64_t i, std::int64_t j, std::int64_t k) const {
    return (k * dims[1] + j) * dims[0] + i;
  }
  std::array<std::int64_t, 3> coords(std::int64_t idx) const {
    const std::int64_t i = idx % dims[0];
    const std::int64_t j = (idx / dims[0]) % dims[1];
    const std::int64_t k = idx / (dims[0] * dims[1]);
    return {i, j, k};
  }
  Vec3 center(std::int64_t idx) const {
    const auto c = coords(idx);
    return origin + res * Vec3(static_cast<double>(c[0]), static_cast<double>(c[1]),
                               static_cast<double>(c[2]));
  }
  std::int64_t snap(const Vec3& p) const {
    std::array<std::int64_t, 3> c{};
    for (int a = 0; a < 3; ++a) {
      const auto v = static_cast<std::int64_t>(std::llround((p[a] - origin[a]) / res));
      c[a] = std::clamp<std::int64_t>(v, 0, dims[a] - 1);
    }
    return index(c[0], c[1], c[2]);
  }
};

}  // namespace

PathCandidate plan_a_star(const InstanceMap& map, const Vec3& start, const Vec3& goal,
                          const PlannerConfig& cfg) {
  cfg.validate();
  Lattice lat{cfg.bounds.min, cfg.grid_res, {}};
  std::int64_t total = 1;
  for (int a = 0; a < 3; ++a) {
    lat.dims[a] = static_cast<std::int64_t>(std::floor(cfg.bounds.extent()[a] / cfg.grid_res)) + 1;
    total *= lat.dims[a];
  }
  if (total > kMaxCells) throw std::invalid_argument("A* lattice too large for the bounds/grid_res");

  PathCandidate out;
  out.goal = goal;
  if ((start - goal).norm() == 0.0) {
    out.waypoints = {start};
    out.cost = 0.0;
    out.min_clearance = map.signed_distance(start);
    return out;
  }

  const std::int64_t s = lat.snap(start);
  const std::int64_t g = lat.snap(goal);

  enum : std::uint8_t { kUnknown = 0, kFree = 1, kBlocked = 2 };
  std::vector<std::uint8_t> occupancy(static_cast<std::size_t>(total), kUnknown);
  const auto free_cell = [&](std::int64_t idx) {
    auto& o = occupancy[static_cast<std::size_t>(idx)];
    if (o == kUnknown) o = map.signed_distance(lat.center(idx)) >= cfg.d_safe ? kFree : kBlocked;
    return o == kFree;
  };

  std::vector<double> g_cost(static_cast<std::size_t>(total), kInf);
  std::vector<std::int64_t> came_from(static_cast<std::size_t>(total), -1);
  std::vector<std::uint8_t> closed(static_cast<std::size_t>(total), 0);

  // (f, h, cell) ordering makes pops deterministic on ties.
  using Entry = std::tuple<double, double, std::int64_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  const Vec3 goal_center = lat.center(g);
  const auto heuristic = [&](std::int64_t idx) { return (lat.center(idx) - goal_center).norm(); };

  if (!free_cell(s)) throw PathNotFound("A* start cell is occupied");
  if (!free_cell(g)) throw PathNotFound("A* goal cell is occupied");

  g_cost[static_cast<std::size_t>(s)] = 0.0;
  open.emplace(heuristic(s), heuristic(s), s);
  int expansions = 0;
  bool found = false;

  while (!open.empty()) {
    const auto [f, h, cur] = open.top();
    open.pop();
    if (closed[static_cast<std::size_t>(cur)]) continue;
    closed[static_cast<std::size_t>(cur)] = 1;
    ++expansions;
    if (cur == g) {
      found = true;
      break;
    }
    const auto c = lat.coords(cur);
    const Vec3 pc = lat.center(cur);
    for (int dk = -1; dk <= 1; ++dk)
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          if (di == 0 && dj == 0 && dk == 0) continue;
          const std::int64_t ni = c[0] + di, nj = c[1] + dj, nk = c[2] + dk;
          if (ni < 0 || nj < 0 || nk < 0 || ni >= lat.dims[0] || nj >= lat.dims[1] ||
              nk >= lat.dims[2])
            continue;
          const std::int64_t nb = lat.index(ni, nj, nk);
          if (closed[static_cast<std::size_t>(nb)]) continue;
          if (!free_cell(nb)) continue;
          const Vec3 pn = lat.center(nb);
          const double step = (pn - pc).norm();
          const double tentative = g_cost[static_cast<std::size_t>(cur)] + step;
          if (tentative >= g_cost[static_cast<std::size_t>(nb)]) continue;
          if (!segment_clear(map, pc, pn, cfg.collision_step, cfg.edge_clearance)) continue;
          g_cost[static_cast<std::size_t>(nb)] = tentative;
          came_from[static_cast<std::size_t>(nb)] = cur;
          const double hn = heuristic(nb);
          open.emplace(tentative + hn, hn, nb);
        }
  }
  if (!found) throw PathNotFound("A* exhausted the reachable lattice without reaching the goal");

  std::vector<Vec3> cells;
  for (std::int64_t n = g; n >= 0; n = came_from[static_cast<std::size_t>(n)])
    cells.push_back(lat.center(n));
  std::reverse(cells.begin(), cells.end());
  // The vehicle sits at `start`, which may be off-lattice.
  if ((cells.front() - start).norm() > 0.0 &&
      segment_clear(map, start, cells.size() > 1 ? cells[1] : cells[0], cfg.collision_step,
                    cfg.edge_clearance))
    cells.front() = start;

  out.waypoints = std::move(cells);
  out.cost = path_cost(out.waypoints, goal);
  out.min_clearance = path_min_clearance(map, out.waypoints, cfg.collision_step);
  out.iterations = expansions;
  return out;
}

}  // namespace kdplan
