#pragma once

#include <functional>
#include <span>
#include <vector>

#include "actrack/kinematics.hpp"
#include "actrack/observation.hpp"
#include "actrack/random.hpp"

namespace actrack {

/// Weighted-particle belief over the joint robot/source state.
/// Weights are non-negative and sum to 1; `generation` is the time index.
struct ParticleSet {
  std::vector<WorldState> particles;
  std::vector<double> weights;
  int generation = 0;

  std::size_t size() const { return particles.size(); }
};

/// Instantaneous reward: raw negative-entropy estimate in nats, and its
/// affine rescaling into [-1, 0].
struct Reward {
  double raw = 0.0;
  double normalized = 0.0;
};

/// Affine map sending raw = -h_hi to -1 and raw = -h_lo to 0, clamped.
/// Bounds are fixed per run so values remain comparable across tree nodes.
struct RewardNormalizer {
  double h_lo = 0.0;
  double h_hi = 1.0;

  double operator()(double raw) const;

  /// Default bounds for a rectangular room: h_hi is the entropy of the
  /// uniform position-plus-heading belief, h_lo a 5 cm localization floor.
  static RewardNormalizer for_room(double width, double height);
};

using LikelihoodFn = std::function<double(const WorldState&, const Observation&)>;

/// Everything a belief update needs: joint dynamics, an observation
/// likelihood, and the reward normalizer.
struct BeliefModels {
  JointTransitionModel transition;
  LikelihoodFn likelihood;
  RewardNormalizer normalizer;
};

/// Low-variance resampling: one uniform offset, an evenly spaced comb of
/// `count` positions against the cumulative weights. Returns parent indices;
/// offspring counts obey |n_i - count*w_i| <= 1. count < 0 means weights.size().
std::vector<int> systematic_resample(std::span<const double> weights,
                                     RandomStream& rng, int count = -1);

/// Same with an explicit comb offset in [0, 1/count).
std::vector<int> systematic_resample_with_offset(std::span<const double> weights,
                                                 double offset, int count = -1);

/// Resamples a belief down (or up) to `count` uniformly weighted particles.
ParticleSet resample_to(const ParticleSet& belief, int count, RandomStream& rng);

/// Weighted mean of the source position.
struct SourceEstimate {
  double x = 0.0;
  double y = 0.0;
};
SourceEstimate point_estimate(const ParticleSet& belief);

/// Recursive weighted particle-based estimate of the negative belief
/// entropy after fusing (u, z):
///
///   R = -log(sum_i lik_i w_prev_i)
///       + sum_i w_post_i * log(lik_i * sum_nu p(x_i | x_nu, u) w_prev_nu)
///
/// `propagated` are the transition-sampled children of `prev.particles` in
/// index correspondence, `posterior_weights` the reweighted (pre-resampling)
/// weights, `likelihoods` the per-particle observation likelihoods.
/// Likelihoods are floored at kLikelihoodFloor and the inner mixture at a
/// log floor, so the result is always finite.
double entropy_reward(const ParticleSet& prev,
                      std::span<const WorldState> propagated,
                      std::span<const double> posterior_weights,
                      std::span<const double> likelihoods,
                      const JointTransitionModel& transition, const Action& u);

struct SirResult {
  ParticleSet belief;    // resampled, uniform weights
  Reward reward;
  bool degenerate = false;  // every likelihood fell to the floor
};

/// One SIR step: propagate robot (commanded) and source (zero action)
/// sub-states, reweight by the observation likelihood, compute the entropy
/// reward from pre-resampling quantities, then systematically resample.
SirResult sir_update(const ParticleSet& belief, const Action& u,
                     const Observation& z, const BeliefModels& models,
                     RandomStream& rng);

}  // namespace actrack
