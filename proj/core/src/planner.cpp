#include "actrack/planner.hpp"

#include <cmath>
#include <string>

#include "actrack/errors.hpp"

namespace actrack {

void PlannerConfig::validate() const {
  if (horizon < 1) throw ConfigError("planner.horizon: must be >= 1");
  if (budget < 1) throw ConfigError("planner.budget: must be >= 1");
  if (!(discount >= 0.0 && discount <= 1.0)) {
    throw ConfigError("planner.gamma: must lie in [0, 1]");
  }
  if (!(exploration > 0.0)) throw ConfigError("planner.c: must be > 0");
  if (!(epsilon > 0.0)) throw ConfigError("planner.epsilon: must be > 0");
  if (plan_particles < 1) throw ConfigError("planner.plan_particles: must be >= 1");
}

int ucb_select(std::span<const ActionStats> actions, int node_visits, double c,
               double eps) {
  assert(!actions.empty());
  const double log_n = node_visits > 0 ? std::log(node_visits) : 0.0;
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < actions.size(); ++j) {
    const double bonus = c * std::sqrt(log_n / (actions[j].visits + eps));
    const double score = actions[j].value + bonus;
    if (score > best_score) {
      best = static_cast<int>(j);
      best_score = score;
    }
  }
  return best;
}

}  // namespace actrack
