#include "actrack/world.hpp"

#include <cassert>
#include <cmath>
#include <limits>

#include "actrack/tracking_model.hpp"

namespace actrack {

namespace {

// Stream identifiers; keeping them distinct makes the baseline episodes
// independent of how many draws the planner consumes.
enum StreamId : std::uint64_t {
  kWorldStream = 1,
  kFilterStream = 2,
  kPolicyStream = 3,
};

PlanarBounds bounds_of(const Room& room) {
  return PlanarBounds{room.width, room.height};
}

std::array<SourceEstimate, 4> room_corners(const Room& room) {
  return {SourceEstimate{0.0, 0.0}, SourceEstimate{room.width, 0.0},
          SourceEstimate{room.width, room.height},
          SourceEstimate{0.0, room.height}};
}

}  // namespace

WorldState step_world(const WorldState& w, const Action& u, const Room& room,
                      const JointTransitionModel& truth, RandomStream& rng) {
  WorldState next = truth.sample(w, u, rng);
  next.robot = reflect_into_bounds(next.robot, bounds_of(room));
  next.source = reflect_into_bounds(next.source, bounds_of(room));
  return next;
}

Observation observe_world(const WorldState& w, const ObservationTable& table,
                          const AoaGrid& grid, RandomStream& rng) {
  const std::vector<double> pmf = observation_pmf(table, grid, w);
  return sample_observation(pmf, grid, rng);
}

Action random_policy(const ActionSet& actions, RandomStream& rng) {
  return actions[static_cast<std::size_t>(
      rng.uniform_int(static_cast<int>(actions.size())))];
}

PatrolResult patrol_policy(const PatrolState& state, const AgentState& robot,
                           const Room& room, const ActionSet& actions,
                           TimeStep dt, double r_visit) {
  PatrolResult out;
  out.state = state;

  const auto corners = room_corners(room);
  for (std::size_t j = 0; j < corners.size(); ++j) {
    if (std::hypot(robot.x - corners[j].x, robot.y - corners[j].y) <= r_visit) {
      out.state.visited[j] = true;
    }
  }
  bool all_visited = true;
  for (bool v : out.state.visited) all_visited &= v;
  if (all_visited) out.state.visited = {};

  int target = -1;
  double target_dist = -1.0;
  for (std::size_t j = 0; j < corners.size(); ++j) {
    if (out.state.visited[j]) continue;
    const double d = std::hypot(robot.x - corners[j].x, robot.y - corners[j].y);
    if (d > target_dist) {
      target = static_cast<int>(j);
      target_dist = d;
    }
  }
  assert(target >= 0);
  out.state.current_target = target;

  // Patrolling always moves: hold-position commands only compete when the
  // action set offers nothing else, otherwise facing away from the target
  // would freeze the robot.
  const SourceEstimate goal = corners[static_cast<std::size_t>(target)];
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < actions.size(); ++j) {
    if (actions[j].stop) continue;
    const AgentState moved = deterministic_transition(robot, actions[j], dt);
    const double d = std::hypot(moved.x - goal.x, moved.y - goal.y);
    if (d < best_dist) {
      best = static_cast<int>(j);
      best_dist = d;
    }
  }
  out.action = actions[static_cast<std::size_t>(best < 0 ? 0 : best)];
  return out;
}

std::string PolicySpec::label() const {
  switch (kind) {
    case Kind::Mcts:
      return "mcts";
    case Kind::Random:
      return "random";
    case Kind::Patrol:
      return "patrol";
  }
  return "unknown";
}

Episode run_episode(const PolicySpec& policy, const EpisodeConfig& cfg,
                    const ObservationTable& table, const AoaGrid& grid,
                    std::uint64_t seed) {
  assert(cfg.episode_length >= 1);
  assert(!cfg.actions.empty());

  RandomStream world_rng(seed, kWorldStream);
  RandomStream filter_rng(seed, kFilterStream);
  RandomStream policy_rng(seed, kPolicyStream);

  const JointTransitionModel truth(cfg.truth_robot, cfg.truth_source, cfg.dt);
  const JointTransitionModel filter(cfg.filter_robot, cfg.filter_source,
                                    cfg.dt, bounds_of(cfg.room));

  PlannerConfig planner_cfg = cfg.planner;
  if (policy.kind == PolicySpec::Kind::Mcts) planner_cfg.horizon = policy.horizon;

  const TrackingModel model(cfg.actions, filter, table, grid, cfg.normalizer);
  const BeliefModels belief_models = model.belief_models();
  MctsPlanner<TrackingModel> planner(model, planner_cfg);

  Episode ep;
  ep.seed = seed;

  // Ground truth: uniform positions and headings, nominal speeds.
  WorldState truth_state;
  truth_state.robot.x = world_rng.uniform(0.0, cfg.room.width);
  truth_state.robot.y = world_rng.uniform(0.0, cfg.room.height);
  truth_state.robot.theta = world_rng.uniform(-180.0, 180.0);
  truth_state.robot.v = cfg.robot_speed;
  truth_state.source.x = world_rng.uniform(0.0, cfg.room.width);
  truth_state.source.y = world_rng.uniform(0.0, cfg.room.height);
  truth_state.source.theta = world_rng.uniform(-180.0, 180.0);
  truth_state.source.v = cfg.source_speed;

  // Initial belief: the robot sub-state is known, the source is uniform over
  // the enclosure with uniform heading at nominal speed.
  ParticleSet belief;
  belief.particles.resize(static_cast<std::size_t>(cfg.num_particles));
  for (auto& p : belief.particles) {
    p.robot = truth_state.robot;
    p.source.x = filter_rng.uniform(0.0, cfg.room.width);
    p.source.y = filter_rng.uniform(0.0, cfg.room.height);
    p.source.theta = filter_rng.uniform(-180.0, 180.0);
    p.source.v = cfg.source_speed;
  }
  belief.weights.assign(belief.particles.size(),
                        1.0 / static_cast<double>(cfg.num_particles));

  const auto record = [&](const Action& a, const Observation& z) {
    const SourceEstimate est = point_estimate(belief);
    ep.true_states.push_back(truth_state);
    ep.actions.push_back(a);
    ep.observations.push_back(z);
    ep.errors.push_back(std::hypot(truth_state.source.x - est.x,
                                   truth_state.source.y - est.y));
  };
  record(Action{}, Observation{});

  PatrolState patrol;
  const Action& fixed_action =
      cfg.actions[static_cast<std::size_t>(cfg.fixed_action_index)];

  for (int t = 1; t < cfg.episode_length; ++t) {
    Action u;
    if (t <= 2) {
      u = fixed_action;
    } else {
      switch (policy.kind) {
        case PolicySpec::Kind::Random:
          u = random_policy(cfg.actions, policy_rng);
          break;
        case PolicySpec::Kind::Patrol: {
          PatrolResult r = patrol_policy(patrol, truth_state.robot, cfg.room,
                                         cfg.actions, cfg.dt);
          patrol = r.state;
          u = r.action;
          break;
        }
        case PolicySpec::Kind::Mcts: {
          if (!planner.rooted()) {
            planner.reset(
                resample_to(belief, planner_cfg.plan_particles, policy_rng));
          }
          const int idx =
              planner.plan(belief.particles, belief.weights, policy_rng);
          u = cfg.actions[static_cast<std::size_t>(idx)];
          break;
        }
      }
    }

    truth_state = step_world(truth_state, u, cfg.room, truth, world_rng);
    const Observation z = observe_world(truth_state, table, grid, world_rng);

    SirResult sir = sir_update(belief, u, z, belief_models, filter_rng);
    belief = std::move(sir.belief);
    if (sir.degenerate) ++ep.degenerate_updates;

    // The array pose is measured after each executed movement: the update
    // fuses under one step of execution noise, then the robot sub-state
    // collapses to the known pose. Planner-internal updates never anchor.
    for (WorldState& p : belief.particles) p.robot = truth_state.robot;

    if (policy.kind == PolicySpec::Kind::Mcts && planner.rooted()) {
      planner.advance(u.index, z.bin_index,
                      resample_to(belief, planner_cfg.plan_particles,
                                  policy_rng));
    }

    record(u, z);
  }

  ep.planner_stats = planner.stats();
  return ep;
}

}  // namespace actrack
