#include <benchmark/benchmark.h>

#include "actrack/belief.hpp"
#include "actrack/observation.hpp"
#include "actrack/tracking_model.hpp"
#include "actrack/world.hpp"

namespace {

using namespace actrack;

// Belief over a room with the default noise tables, ready for SIR updates.
struct Fixture {
  ObservationTable table = build_synthetic_table(SyntheticTableParams{});
  AoaGrid grid = AoaGrid::with_resolution(5.0);
  JointTransitionModel filter{MotionNoise{0.0, 0.0, 0.0, 5.0},
                              MotionNoise{0.1, 0.1, 0.025, 10.0},
                              TimeStep{1.0}};
  ActionSet actions{Action{0.0, true, 0}, Action{-45.0, false, 1},
                    Action{0.0, false, 2}, Action{45.0, false, 3}};
  RewardNormalizer normalizer = RewardNormalizer::for_room(7.0, 5.0);
  TrackingModel model{actions, filter, table, grid, normalizer};

  ParticleSet make_belief(int count, RandomStream& rng) const {
    ParticleSet belief;
    belief.particles.resize(static_cast<std::size_t>(count));
    for (auto& p : belief.particles) {
      p.robot = AgentState{1.0, 1.0, 30.0, 0.3};
      p.source.x = rng.uniform(0.0, 7.0);
      p.source.y = rng.uniform(0.0, 5.0);
      p.source.theta = rng.uniform(-180.0, 180.0);
      p.source.v = 0.3;
    }
    belief.weights.assign(belief.particles.size(), 1.0 / count);
    return belief;
  }
};

void BM_SirUpdate(benchmark::State& state) {
  Fixture f;
  RandomStream rng(7);
  const ParticleSet belief = f.make_belief(static_cast<int>(state.range(0)), rng);
  const BeliefModels models = f.model.belief_models();
  const Observation z{18, 90.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sir_update(belief, f.actions[2], z, models, rng));
  }
}
BENCHMARK(BM_SirUpdate)->Arg(100)->Arg(150)->Arg(300);

void BM_ObservationPmf(benchmark::State& state) {
  Fixture f;
  WorldState w;
  w.robot = AgentState{1.0, 1.0, 30.0, 0.3};
  w.source = AgentState{4.0, 3.0, 0.0, 0.3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(observation_pmf(f.table, f.grid, w));
  }
}
BENCHMARK(BM_ObservationPmf);

void BM_SystematicResample(benchmark::State& state) {
  RandomStream rng(3);
  const int n = static_cast<int>(state.range(0));
  std::vector<double> weights(static_cast<std::size_t>(n));
  double sum = 0.0;
  for (double& w : weights) {
    w = rng.uniform();
    sum += w;
  }
  for (double& w : weights) w /= sum;
  for (auto _ : state) {
    benchmark::DoNotOptimize(systematic_resample(weights, rng));
  }
}
BENCHMARK(BM_SystematicResample)->Arg(1000)->Arg(10000);

void BM_PlanStep(benchmark::State& state) {
  Fixture f;
  RandomStream rng(11);
  const ParticleSet belief = f.make_belief(300, rng);
  PlannerConfig cfg;
  cfg.horizon = 5;
  cfg.budget = static_cast<int>(state.range(0));
  cfg.plan_particles = 150;
  for (auto _ : state) {
    MctsPlanner<TrackingModel> planner(f.model, cfg);
    planner.reset(resample_to(belief, cfg.plan_particles, rng));
    benchmark::DoNotOptimize(
        planner.plan(belief.particles, belief.weights, rng));
  }
}
BENCHMARK(BM_PlanStep)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
