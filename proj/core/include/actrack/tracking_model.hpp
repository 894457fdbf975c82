#pragma once

#include <cmath>
#include <utility>

#include "actrack/belief.hpp"
#include "actrack/kinematics.hpp"
#include "actrack/observation.hpp"
#include "actrack/random.hpp"

namespace actrack {

/// Generative model handed to the MCTS planner: joint robot/source dynamics,
/// quantized-Gaussian AoA observations and SIR belief updates carrying the
/// entropy reward. Holds the observation table and grid by reference; both
/// are immutable and shareable across threads.
class TrackingModel {
 public:
  using State = WorldState;
  using Belief = ParticleSet;

  struct Update {
    ParticleSet belief;
    double reward = 0.0;  // normalized to [-1, 0]
  };

  TrackingModel(ActionSet actions, JointTransitionModel transition,
                const ObservationTable& table, const AoaGrid& grid,
                RewardNormalizer normalizer)
      : actions_(std::move(actions)),
        transition_(transition),
        table_(&table),
        grid_(&grid),
        normalizer_(normalizer) {}

  int num_actions() const { return static_cast<int>(actions_.size()); }
  const ActionSet& actions() const { return actions_; }
  const Action& action(int index) const {
    return actions_[static_cast<std::size_t>(index)];
  }
  const AoaGrid& grid() const { return *grid_; }
  const JointTransitionModel& transition() const { return transition_; }

  WorldState sample_transition(const WorldState& w, int u,
                               RandomStream& rng) const {
    return transition_.sample(w, action(u), rng);
  }

  int sample_observation(const WorldState& w, RandomStream& rng) const {
    const std::vector<double> pmf = observation_pmf(*table_, *grid_, w);
    return sample_observation_pmf(pmf, rng);
  }

  Update update_belief(const ParticleSet& belief, int u, int z,
                       RandomStream& rng) const {
    const Observation obs{z, grid_->value(z)};
    SirResult sir = sir_update(belief, action(u), obs, belief_models(), rng);
    return {std::move(sir.belief), sir.reward.normalized};
  }

  /// Action whose (noisy) robot-only transition lands closest to the
  /// belief's source estimate; ties break to the lowest index.
  int informed_action(const WorldState& w, const ParticleSet& belief,
                      RandomStream& rng) const {
    const SourceEstimate est = point_estimate(belief);
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < actions_.size(); ++j) {
      const AgentState moved =
          actrack::sample_transition(w.robot, actions_[j],
                                     transition_.robot_noise(),
                                     transition_.dt(), rng);
      const double d = std::hypot(moved.x - est.x, moved.y - est.y);
      if (d < best_dist) {
        best = static_cast<int>(j);
        best_dist = d;
      }
    }
    return best;
  }

  BeliefModels belief_models() const {
    return BeliefModels{
        transition_,
        [table = table_, grid = grid_](const WorldState& w,
                                       const Observation& z) {
          return likelihood(*table, *grid, w, z);
        },
        normalizer_};
  }

 private:
  int sample_observation_pmf(std::span<const double> pmf,
                             RandomStream& rng) const {
    return actrack::sample_observation(pmf, *grid_, rng).bin_index;
  }

  ActionSet actions_;
  JointTransitionModel transition_;
  const ObservationTable* table_;
  const AoaGrid* grid_;
  RewardNormalizer normalizer_;
};

}  // namespace actrack
