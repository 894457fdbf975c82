#include "actrack/belief.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace actrack {

namespace {

// Keeps the reward finite when a mixture term degenerates to zero density.
constexpr double kLogFloor = -700.0;

}  // namespace

double RewardNormalizer::operator()(double raw) const {
  const double t = (raw + h_hi) / (h_hi - h_lo);
  return std::clamp(t, 0.0, 1.0) - 1.0;
}

RewardNormalizer RewardNormalizer::for_room(double width, double height) {
  RewardNormalizer n;
  n.h_hi = std::log(width * height) + std::log(360.0);
  const double sigma_floor = 0.05;
  n.h_lo = std::log(2.0 * kPi * std::exp(1.0) * sigma_floor * sigma_floor);
  return n;
}

std::vector<int> systematic_resample_with_offset(
    std::span<const double> weights, double offset, int count) {
  const int n = count < 0 ? static_cast<int>(weights.size()) : count;
  assert(n >= 1);
  assert(offset >= 0.0 && offset < 1.0 / n);

  std::vector<int> parents(static_cast<std::size_t>(n));
  const int last = static_cast<int>(weights.size()) - 1;
  int j = 0;
  double cum = weights[0];
  for (int k = 0; k < n; ++k) {
    const double pos = offset + static_cast<double>(k) / n;
    while (pos >= cum && j < last) {
      ++j;
      cum += weights[static_cast<std::size_t>(j)];
    }
    parents[static_cast<std::size_t>(k)] = j;
  }
  return parents;
}

std::vector<int> systematic_resample(std::span<const double> weights,
                                     RandomStream& rng, int count) {
  const int n = count < 0 ? static_cast<int>(weights.size()) : count;
  return systematic_resample_with_offset(weights, rng.uniform() / n, n);
}

ParticleSet resample_to(const ParticleSet& belief, int count,
                        RandomStream& rng) {
  const std::vector<int> parents =
      systematic_resample(belief.weights, rng, count);
  ParticleSet out;
  out.particles.reserve(parents.size());
  for (int p : parents) {
    out.particles.push_back(belief.particles[static_cast<std::size_t>(p)]);
  }
  out.weights.assign(parents.size(), 1.0 / static_cast<double>(parents.size()));
  out.generation = belief.generation;
  return out;
}

SourceEstimate point_estimate(const ParticleSet& belief) {
  SourceEstimate est;
  for (std::size_t i = 0; i < belief.size(); ++i) {
    est.x += belief.weights[i] * belief.particles[i].source.x;
    est.y += belief.weights[i] * belief.particles[i].source.y;
  }
  return est;
}

double entropy_reward(const ParticleSet& prev,
                      std::span<const WorldState> propagated,
                      std::span<const double> posterior_weights,
                      std::span<const double> likelihoods,
                      const JointTransitionModel& transition, const Action& u) {
  const std::size_t n = prev.size();
  assert(propagated.size() == n);
  assert(posterior_weights.size() == n);
  assert(likelihoods.size() == n);

  thread_local std::vector<double> log_prev_w, mixture;
  log_prev_w.resize(n);
  mixture.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    log_prev_w[i] = std::log(prev.weights[i]);
  }
  transition.mixture_log_density(propagated, prev.particles, log_prev_w, u,
                                 mixture);

  double predictive = 0.0;  // sum_i lik_i * w_prev_i
  double cross = 0.0;       // sum_i w_post_i * log(lik_i * mixture_i)
  for (std::size_t i = 0; i < n; ++i) {
    const double lik = std::max(likelihoods[i], kLikelihoodFloor);
    predictive += lik * prev.weights[i];
    const double mix = std::max(mixture[i], kLogFloor);
    cross += posterior_weights[i] * (std::log(lik) + mix);
  }
  return -std::log(predictive) + cross;
}

SirResult sir_update(const ParticleSet& belief, const Action& u,
                     const Observation& z, const BeliefModels& models,
                     RandomStream& rng) {
  const std::size_t n = belief.size();
  assert(n >= 1);

  SirResult result;
  std::vector<WorldState> propagated(n);
  std::vector<double> lik(n);
  bool any_above_floor = false;
  for (std::size_t i = 0; i < n; ++i) {
    propagated[i] = models.transition.sample(belief.particles[i], u, rng);
    lik[i] = std::max(models.likelihood(propagated[i], z), kLikelihoodFloor);
    if (lik[i] > kLikelihoodFloor) any_above_floor = true;
  }

  std::vector<double> posterior(n);
  if (!any_above_floor) {
    result.degenerate = true;
    std::fill(posterior.begin(), posterior.end(), 1.0 / static_cast<double>(n));
  } else {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      posterior[i] = belief.weights[i] * lik[i];
      sum += posterior[i];
    }
    for (double& w : posterior) w /= sum;
  }

  result.reward.raw =
      entropy_reward(belief, propagated, posterior, lik, models.transition, u);
  result.reward.normalized = models.normalizer(result.reward.raw);

  const std::vector<int> parents = systematic_resample(posterior, rng);
  result.belief.particles.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    result.belief.particles[k] = propagated[static_cast<std::size_t>(parents[k])];
  }
  result.belief.weights.assign(n, 1.0 / static_cast<double>(n));
  result.belief.generation = belief.generation + 1;
  return result;
}

}  // namespace actrack
