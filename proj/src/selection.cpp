#include <algorithm>
#include <exception>
#include <optional>
#include <thread>

#include "kdplan/planners.hpp"

namespace kdplan {

Selection select_candidate(std::vector<PathCandidate> candidates, double d_safe) {
  if (candidates.empty()) throw AllPlannersFailed("no candidates to select from");
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const PathCandidate& a, const PathCandidate& b) { return a.cost < b.cost; });

  Selection out;
  auto safe = std::find_if(candidates.begin(), candidates.end(),
                           [&](const PathCandidate& c) { return c.min_clearance >= d_safe; });
  if (safe != candidates.end()) {
    out.selected_rank = static_cast<std::size_t>(safe - candidates.begin());
  } else {
    out.fallback = true;
    // First maximum wins, i.e. the cheaper of equally clear candidates.
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i)
      if (candidates[i].min_clearance > candidates[best].min_clearance) best = i;
    out.selected_rank = best;
  }
  out.selected = candidates[out.selected_rank];
  out.all = std::move(candidates);
  return out;
}

Selection plan_and_select(const InstanceMap& map, const SearchSetup& setup,
                          const PlannerConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.num_parallel);
  std::vector<std::optional<PathCandidate>> results(n);
  std::vector<std::exception_ptr> errors(n);

  {
    std::vector<std::jthread> workers;
    workers.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      workers.emplace_back([&, i] {
        PlannerConfig local = cfg;
        local.seed = derive_seed(cfg.seed, i);
        try {
          results[i] = rrt_star_search(map, setup, local);
        } catch (const PathNotFound&) {
          // An instance failing is expected; only all failing is an error.
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
  }

  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<PathCandidate> candidates;
  for (auto& r : results)
    if (r) candidates.push_back(std::move(*r));
  if (candidates.empty())
    throw AllPlannersFailed("all " + std::to_string(n) + " planner instances failed");
  return select_candidate(std::move(candidates), cfg.d_safe);
}

Selection plan_and_select(const InstanceMap& map, const Vec3& start, const Vec3& goal,
                          const PlannerConfig& cfg) {
  return plan_and_select(map, prepare_search(map, start, goal, cfg), cfg);
}

}  // namespace kdplan
