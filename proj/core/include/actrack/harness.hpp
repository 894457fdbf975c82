#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actrack/belief.hpp"
#include "actrack/errors.hpp"
#include "actrack/observation.hpp"
#include "actrack/planner.hpp"
#include "actrack/world.hpp"

namespace actrack {

/// Full parameterization of a batch run. Loaded from a flat key-value file
/// with dotted section keys (`planner.gamma = 0.9`); unknown keys are errors.
struct ExperimentConfig {
  Room room{7.0, 5.0};
  TimeStep dt{1.0};
  double robot_speed = 0.3;
  double source_speed = 0.3;
  MotionNoise robot_noise{0.0, 0.0, 0.0, 5.0};
  MotionNoise source_noise{0.0, 0.0, 0.025, 10.0};

  int num_particles = 1000;           // filter.num_particles
  double filter_source_sigma_xy = 0.1;

  std::vector<double> action_speeds{-45.0, 0.0, 45.0};
  bool stop_action = true;

  PlannerConfig planner;

  // NaN means "derive from the room" (see RewardNormalizer::for_room).
  double reward_h_lo = std::numeric_limits<double>::quiet_NaN();
  double reward_h_hi = std::numeric_limits<double>::quiet_NaN();

  double observation_resolution = 5.0;
  std::string table_path;  // empty -> synthetic
  SyntheticTableParams synthetic;

  int num_episodes = 10;
  int episode_length = 30;
  std::uint64_t base_seed = 1;
  std::vector<PolicySpec> policies;
  int threads = 1;

  /// Reads and validates a config file. Throws IoError when the file cannot
  /// be read, ConfigError (naming the field) on invalid content.
  static ExperimentConfig load(const std::string& path);
  /// Parses config text; `origin` labels error messages.
  static ExperimentConfig parse(const std::string& text,
                                const std::string& origin);

  void validate() const;

  ActionSet make_actions() const;
  int fixed_action_index() const;
  RewardNormalizer make_normalizer() const;
  ObservationTable make_table() const;  // load table_path or synthesize
  AoaGrid make_grid() const;
  EpisodeConfig make_episode_config() const;
};

/// One raw output row: per-step source-position error of one episode.
struct MetricsRecord {
  std::string policy;
  int horizon = 0;  // K; 0 for the baselines
  std::uint64_t seed = 0;
  int t = 0;
  double error_m = 0.0;
};

struct AggregateRecord {
  std::string policy;
  int horizon = 0;
  int t = 0;
  double mean_error_m = 0.0;
  double std_error_m = 0.0;
};

struct PolicyRunStats {
  PolicySpec policy;
  PlannerStats planner;
  long long degenerate_updates = 0;
};

struct BatchResult {
  std::vector<MetricsRecord> raw;
  std::vector<AggregateRecord> aggregates;
  std::vector<PolicyRunStats> policy_stats;
};

/// Runs every policy over every episode seed (seed = base_seed + episode
/// index, identical across policies for paired comparison). Episodes execute
/// in parallel on `config.threads` threads; outputs are merged in index
/// order, so results are independent of the thread count.
BatchResult run_batch(const ExperimentConfig& config);

/// Per-episode mean error over steps t in [t_begin, t_end) for one policy,
/// in episode order.
std::vector<double> episode_mean_errors(const BatchResult& result,
                                        const std::string& policy_label,
                                        int horizon, int t_begin, int t_end);

/// Writes `<prefix>_raw.csv`, `<prefix>_summary.csv`, `<prefix>_planner.csv`.
/// Fixed formatting (9 significant digits, LF endings) keeps repeated runs
/// byte-identical.
void write_batch_files(const BatchResult& result, const std::string& prefix);

/// Entry point of the command line tool: subcommands `simulate`, `batch`,
/// `gen-table`. Returns 0 on success, 1 on configuration errors, 2 on I/O
/// errors.
int cli_main(int argc, const char* const* argv);

}  // namespace actrack
