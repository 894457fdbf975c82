#include <array>
#include <cmath>
#include <vector>

#include "actrack/errors.hpp"
#include "actrack/planner.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace actrack;

namespace {

using ToyPlanner = MctsPlanner<oracles::ToyModel>;

oracles::ToyModel last_action_toy(double reward_a, double reward_b) {
  oracles::ToyModel toy;
  toy.obs_prob = {{0.5, 0.5}, {0.5, 0.5}};
  toy.reward_fn = [reward_a, reward_b](const HistoryKey& h) {
    return h.back().first == 0 ? reward_a : reward_b;
  };
  return toy;
}

PlannerConfig toy_config(int horizon, int budget, double discount = 0.9) {
  PlannerConfig cfg;
  cfg.horizon = horizon;
  cfg.budget = budget;
  cfg.discount = discount;
  cfg.exploration = 1.75;
  cfg.epsilon = 1e-6;
  cfg.plan_particles = 1;
  return cfg;
}

const std::vector<int> kToyState = {-1};
const std::vector<double> kToyWeight = {1.0};

template <class Node>
void check_visit_bookkeeping(const Node& node) {
  int total = 0;
  for (const ActionStats& a : node.actions) {
    total += a.visits;
    if (a.visits > 0) CHECK(std::isfinite(a.value));
  }
  CHECK(node.visits == total);
  for (const auto& [key, child] : node.children) {
    check_visit_bookkeeping(*child);
  }
}

}  // namespace

TEST_CASE("planner config validation names the field") {
  PlannerConfig cfg;
  cfg.discount = 1.5;
  CHECK_THROWS_WITH_AS(cfg.validate(), "planner.gamma: must lie in [0, 1]",
                       ConfigError);
  cfg.discount = 0.9;
  cfg.exploration = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.exploration = 1.0;
  cfg.horizon = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("ucb_select") {
  SUBCASE("frozen hand arithmetic") {
    const std::array<ActionStats, 2> actions = {ActionStats{6, -0.5},
                                                ActionStats{4, -0.6}};
    CHECK(ucb_select(actions, 10, 1.75, 1e-6) == 1);
  }
  SUBCASE("unvisited action dominates once ln N is positive") {
    const std::array<ActionStats, 3> actions = {
        ActionStats{2, -0.1}, ActionStats{0, 0.0}, ActionStats{1, -0.2}};
    CHECK(ucb_select(actions, 3, 1.75, 1e-6) == 1);
  }
  SUBCASE("c=0 reduces to the greedy argmax") {
    const std::array<ActionStats, 3> actions = {
        ActionStats{5, -0.7}, ActionStats{5, -0.2}, ActionStats{5, -0.4}};
    CHECK(ucb_select(actions, 15, 0.0, 1e-6) == 1);
  }
  SUBCASE("fresh node ties break to the lowest index") {
    const std::array<ActionStats, 4> actions{};
    CHECK(ucb_select(actions, 0, 1.75, 1e-6) == 0);
  }
  SUBCASE("adding a constant to every value keeps the choice") {
    RandomStream rng(21);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<ActionStats> actions(4);
      int n = 0;
      for (ActionStats& a : actions) {
        a.visits = rng.uniform_int(20);
        a.value = rng.uniform(-1.0, 0.0);
        n += a.visits;
      }
      const int base = ucb_select(actions, n, 1.75, 1e-6);
      const double shift = rng.uniform(-5.0, 5.0);
      for (ActionStats& a : actions) a.value += shift;
      CHECK(ucb_select(actions, n, 1.75, 1e-6) == base);
    }
  }
}

TEST_CASE("simulate base cases") {
  oracles::ToyModel toy;
  toy.obs_prob = {{1.0}};  // one action, one observation
  toy.reward_fn = [](const HistoryKey& h) {
    return h.size() == 1 ? -0.3 : -0.7;
  };

  SUBCASE("at the horizon the return is zero and the tree untouched") {
    ToyPlanner planner(toy, toy_config(3, 1));
    planner.reset({});
    RandomStream rng(22);
    CHECK(planner.simulate(-1, *planner.mutable_root(), 3, rng) == 0.0);
    CHECK(planner.tree_size() == 1);
    CHECK(planner.root()->visits == 0);
  }

  SUBCASE("first simulation seeds the incremental mean") {
    ToyPlanner planner(toy, toy_config(1, 1));
    planner.reset({});
    RandomStream rng(23);
    const double g = planner.simulate(-1, *planner.mutable_root(), 0, rng);
    CHECK(g == doctest::Approx(-0.3));  // K=1: no tail beyond the reward
    CHECK(planner.tree_size() == 2);
    CHECK(planner.root()->visits == 1);
    CHECK(planner.root()->actions[0].visits == 1);
    CHECK(planner.root()->actions[0].value == doctest::Approx(-0.3));
  }

  SUBCASE("two passes through the same child average their returns") {
    ToyPlanner planner(toy, toy_config(2, 2));
    planner.reset({});
    RandomStream rng(24);
    const double g1 = planner.simulate(-1, *planner.mutable_root(), 0, rng);
    const double g2 = planner.simulate(-1, *planner.mutable_root(), 0, rng);
    CHECK(planner.root()->actions[0].visits == 2);
    CHECK(planner.root()->actions[0].value ==
          doctest::Approx(0.5 * (g1 + g2)).epsilon(1e-12));
    // Deterministic toy: both passes earn reward -0.3 then -0.7 discounted.
    CHECK(g1 == doctest::Approx(-0.3 + 0.9 * -0.7));
    CHECK(g2 == doctest::Approx(g1));
  }
}

TEST_CASE("value estimates equal the arithmetic mean of backed-up returns") {
  oracles::ToyModel toy;
  toy.obs_prob = {{0.7, 0.3}, {0.4, 0.6}};
  RandomStream reward_rng(25);
  // Fixed pseudo-random reward table over histories up to depth 3.
  toy.reward_fn = [](const HistoryKey& h) {
    std::uint64_t key = 0x9e3779b9;
    for (const auto& [u, z] : h) {
      key = splitmix64(key ^ static_cast<std::uint64_t>(u * 7 + z * 3 + 1));
    }
    return -static_cast<double>(key % 1000) / 1000.0;
  };

  ToyPlanner planner(toy, toy_config(3, 1));
  planner.reset({});
  RandomStream rng(26);

  std::array<int, 2> mirror_n{};
  std::array<double, 2> mirror_v{};
  for (int l = 0; l < 400; ++l) {
    const std::array<int, 2> before = {planner.root()->actions[0].visits,
                                       planner.root()->actions[1].visits};
    const double g = planner.simulate(-1, *planner.mutable_root(), 0, rng);
    const int u = planner.root()->actions[0].visits > before[0] ? 0 : 1;
    auto iu = static_cast<std::size_t>(u);
    mirror_n[iu] += 1;
    mirror_v[iu] = (1.0 - 1.0 / mirror_n[iu]) * mirror_v[iu] + g / mirror_n[iu];
    CHECK(planner.root()->actions[iu].value == mirror_v[iu]);
  }
  check_visit_bookkeeping(*planner.root());
  CHECK(planner.root()->visits == 400);
  CHECK(planner.tree_size() <= 401);  // at most one expansion per simulation
}

TEST_CASE("backed-up returns stay inside the discounted reward range") {
  oracles::ToyModel toy = last_action_toy(-0.2, -0.8);
  const int horizon = 4;
  const double gamma = 0.9;
  ToyPlanner planner(toy, toy_config(horizon, 3000, gamma));
  planner.reset({});
  RandomStream rng(27);
  planner.plan(kToyState, kToyWeight, rng);
  const double bound = -(1.0 - std::pow(gamma, horizon)) / (1.0 - gamma);
  // Every value update counts as a backup, including those at inner depths.
  CHECK(planner.stats().backups >= 3000);
  CHECK(planner.stats().g_min >= bound - 1e-12);
  CHECK(planner.stats().g_max <= 0.0);
}

TEST_CASE("plan") {
  SUBCASE("L=1 expands exactly one child and returns the tried action") {
    oracles::ToyModel toy = last_action_toy(-0.5, -0.5);
    ToyPlanner planner(toy, toy_config(2, 1));
    planner.reset({});
    RandomStream rng(28);
    const int u = planner.plan(kToyState, kToyWeight, rng);
    CHECK(u == 0);  // tie-break at the fresh root picks action 0
    CHECK(planner.tree_size() == 2);
  }

  SUBCASE("prefers the action with higher per-step reward") {
    int wins = 0;
    for (int seed = 0; seed < 100; ++seed) {
      oracles::ToyModel toy = last_action_toy(-0.1, -0.9);
      ToyPlanner planner(toy, toy_config(2, 2000));
      planner.reset({});
      RandomStream rng(static_cast<std::uint64_t>(900 + seed));
      if (planner.plan(kToyState, kToyWeight, rng) == 0) ++wins;
    }
    CHECK(wins >= 95);
  }

  SUBCASE("gamma=0 planning matches K=1 planning in distribution") {
    const int seeds = 300;
    std::array<int, 2> freq{};
    for (int variant = 0; variant < 2; ++variant) {
      for (int seed = 0; seed < seeds; ++seed) {
        oracles::ToyModel toy = last_action_toy(-0.4, -0.5);
        const PlannerConfig cfg =
            variant == 0 ? toy_config(5, 60, 0.0) : toy_config(1, 60, 0.9);
        ToyPlanner planner(toy, cfg);
        planner.reset({});
        RandomStream rng(static_cast<std::uint64_t>(5000 + seed));
        if (planner.plan(kToyState, kToyWeight, rng) == 0) {
          ++freq[static_cast<std::size_t>(variant)];
        }
      }
    }
    const double f0 = freq[0] / static_cast<double>(seeds);
    const double f1 = freq[1] / static_cast<double>(seeds);
    CHECK(std::abs(f0 - f1) < 0.12);
  }
}

TEST_CASE("default rollout") {
  SUBCASE("at the horizon the rollout is zero") {
    oracles::ToyModel toy = last_action_toy(-0.5, -0.5);
    ToyPlanner planner(toy, toy_config(3, 1));
    planner.reset({});
    RandomStream rng(29);
    CHECK(planner.rollout(-1, oracles::ToyModel::Belief{}, 3, rng) == 0.0);
  }

  SUBCASE("undiscounted constant rewards sum over the remaining depth") {
    oracles::ToyModel toy;
    toy.obs_prob = {{0.5, 0.5}, {0.5, 0.5}};
    toy.reward_fn = [](const HistoryKey&) { return -0.25; };
    ToyPlanner planner(toy, toy_config(4, 1, 1.0));
    planner.reset({});
    RandomStream rng(30);
    CHECK(planner.rollout(-1, oracles::ToyModel::Belief{}, 0, rng) ==
          doctest::Approx(-1.0));
    CHECK(planner.rollout(-1, oracles::ToyModel::Belief{}, 2, rng) ==
          doctest::Approx(-0.5));
    CHECK(planner.tree_size() == 1);  // rollouts never add nodes
  }
}

TEST_CASE("tree reuse and pruning across real steps") {
  oracles::ToyModel toy = last_action_toy(-0.3, -0.6);
  ToyPlanner planner(toy, toy_config(3, 500));
  planner.reset({});
  RandomStream rng(31);
  planner.plan(kToyState, kToyWeight, rng);

  SUBCASE("existing child becomes the root with statistics retained") {
    const auto* child = planner.find({{0, 1}});
    REQUIRE(child != nullptr);
    const int child_visits = child->visits;
    const double child_value = child->actions[0].value;
    planner.advance(0, 1, {});
    CHECK(planner.root()->visits == child_visits);
    CHECK(planner.root()->actions[0].value == child_value);
  }

  SUBCASE("unknown observation starts a fresh root") {
    oracles::ToyModel::Belief fresh;
    fresh.history = {{1, 7}};
    planner.advance(1, 7, fresh);  // observation 7 was never simulated
    CHECK(planner.root()->visits == 0);
    CHECK(planner.tree_size() == 1);
    CHECK(planner.root()->belief.history == fresh.history);
  }
}

TEST_CASE("value estimates converge to exhaustive expectimax") {
  oracles::ToyModel toy;
  toy.obs_prob = {{0.7, 0.3}, {0.4, 0.6}};
  const std::array<std::array<double, 2>, 2> r1 = {
      std::array<double, 2>{-0.15, -0.55}, std::array<double, 2>{-0.50, -0.35}};
  const std::array<std::array<double, 2>, 2> base2 = {
      std::array<double, 2>{-0.30, -0.60}, std::array<double, 2>{-0.45, -0.25}};
  const std::array<std::array<double, 2>, 2> bump = {
      std::array<double, 2>{0.00, -0.05}, std::array<double, 2>{-0.10, -0.15}};
  toy.reward_fn = [&](const HistoryKey& h) {
    const auto u = static_cast<std::size_t>(h.back().first);
    const auto z = static_cast<std::size_t>(h.back().second);
    if (h.size() == 1) return r1[u][z];
    const auto u0 = static_cast<std::size_t>(h[0].first);
    const auto z0 = static_cast<std::size_t>(h[0].second);
    return base2[u][z] + bump[u0][z0];
  };

  const double gamma = 0.9;
  const std::array<double, 2> exact = {
      oracles::expectimax_value(toy, {}, 0, 0, 2, gamma),
      oracles::expectimax_value(toy, {}, 1, 0, 2, gamma)};

  ToyPlanner planner(toy, toy_config(2, 30000, gamma));
  planner.reset({});
  RandomStream rng(32);
  const int best = planner.plan(kToyState, kToyWeight, rng);

  CHECK(planner.root()->actions[0].value ==
        doctest::Approx(exact[0]).epsilon(0.05));
  CHECK(planner.root()->actions[1].value ==
        doctest::Approx(exact[1]).epsilon(0.05));
  CHECK(best == (exact[0] > exact[1] ? 0 : 1));
  check_visit_bookkeeping(*planner.root());
}
