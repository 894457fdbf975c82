#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "actrack/belief.hpp"
#include "actrack/kinematics.hpp"
#include "actrack/observation.hpp"
#include "actrack/planner.hpp"

namespace actrack {

struct Room {
  double width = 7.0;   // m
  double height = 5.0;  // m
};

/// Advances both agents one step (source takes the zero action). An agent
/// leaving the room is clamped to the boundary with its heading reflected
/// about the violated wall's normal, so speeds are preserved and
/// trajectories stay inside.
WorldState step_world(const WorldState& w, const Action& u, const Room& room,
                      const JointTransitionModel& truth, RandomStream& rng);

/// Samples the real AoA measurement at the true state.
Observation observe_world(const WorldState& w, const ObservationTable& table,
                          const AoaGrid& grid, RandomStream& rng);

/// Uniform draw from the action set.
Action random_policy(const ActionSet& actions, RandomStream& rng);

/// Corner bookkeeping of the patrolling baseline. Corners are indexed
/// (0,0), (w,0), (w,h), (0,h).
struct PatrolState {
  std::array<bool, 4> visited{};
  int current_target = -1;
};

struct PatrolResult {
  Action action;
  PatrolState state;
};

/// Heads for the most distant unexplored corner: a corner within r_visit of
/// the robot becomes visited, a full set resets, and the returned action is
/// the one whose noise-free one-step displacement gets closest to the target.
PatrolResult patrol_policy(const PatrolState& state, const AgentState& robot,
                           const Room& room, const ActionSet& actions,
                           TimeStep dt, double r_visit = 0.5);

struct PolicySpec {
  enum class Kind { Mcts, Random, Patrol };
  Kind kind = Kind::Mcts;
  int horizon = 5;  // planning depth, Mcts only

  std::string label() const;
};

/// Everything one episode needs; assembled by the harness from the
/// experiment configuration.
struct EpisodeConfig {
  Room room;
  TimeStep dt{1.0};
  double robot_speed = 0.3;   // m/s
  double source_speed = 0.3;  // m/s
  MotionNoise truth_robot;    // simulation noise
  MotionNoise truth_source;
  MotionNoise filter_robot;   // filter-model noise
  MotionNoise filter_source;  // includes the extra source position term
  int num_particles = 1000;   // I, tracking belief
  ActionSet actions;
  int fixed_action_index = 0;  // executed for the first two steps
  PlannerConfig planner;       // horizon overridden per policy
  RewardNormalizer normalizer;
  int episode_length = 30;  // recorded time indices, t = 0..episode_length-1
};

/// Recorded run. Sequences share the episode length; index 0 holds the
/// initial state, its action/observation slots are placeholders.
struct Episode {
  std::vector<WorldState> true_states;
  std::vector<Observation> observations;
  std::vector<Action> actions;
  std::vector<double> errors;  // Euclidean source-position error per step
  std::uint64_t seed = 0;
  PlannerStats planner_stats;
  int degenerate_updates = 0;
};

/// Simulates one episode under the given policy, fully deterministic in
/// (seed, config). Ground truth, filter and policy consume independent
/// random streams so baselines are unaffected by planner internals.
Episode run_episode(const PolicySpec& policy, const EpisodeConfig& cfg,
                    const ObservationTable& table, const AoaGrid& grid,
                    std::uint64_t seed);

}  // namespace actrack
