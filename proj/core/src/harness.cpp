#include "actrack/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "actrack/tracking_model.hpp"

namespace actrack {

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const std::size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& value, const std::string& field) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size()) {
    throw ConfigError(field + ": bad numeric value '" + value + "'");
  }
  return v;
}

long long parse_int(const std::string& value, const std::string& field) {
  char* end = nullptr;
  const long long v = std::strtoll(value.c_str(), &end, 10);
  if (value.empty() || end != value.c_str() + value.size()) {
    throw ConfigError(field + ": bad integer value '" + value + "'");
  }
  return v;
}

// Key-value store with typed, destructive reads; whatever is left at the end
// is an unknown key.
class KeyReader {
 public:
  explicit KeyReader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  std::optional<std::string> take(const std::string& key) {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return std::nullopt;
    std::string value = it->second;
    kv_.erase(it);
    return value;
  }

  double number(const std::string& key, double def) {
    const auto v = take(key);
    return v ? parse_double(*v, key) : def;
  }

  long long integer(const std::string& key, long long def) {
    const auto v = take(key);
    return v ? parse_int(*v, key) : def;
  }

  bool boolean(const std::string& key, bool def) {
    const auto v = take(key);
    if (!v) return def;
    if (*v == "true") return true;
    if (*v == "false") return false;
    throw ConfigError(key + ": expected true or false, got '" + *v + "'");
  }

  std::string text(const std::string& key, std::string def) {
    const auto v = take(key);
    return v ? *v : def;
  }

  std::vector<double> number_list(const std::string& key,
                                  std::vector<double> def) {
    const auto v = take(key);
    if (!v) return def;
    std::vector<double> out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      out.push_back(parse_double(trim(item), key));
    }
    if (out.empty()) throw ConfigError(key + ": empty list");
    return out;
  }

  void finish() const {
    if (!kv_.empty()) {
      throw ConfigError("unknown key: " + kv_.begin()->first);
    }
  }

 private:
  std::map<std::string, std::string> kv_;
};

std::vector<PolicySpec> parse_policies(const std::string& value,
                                       int default_horizon) {
  std::vector<PolicySpec> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string entry = trim(item);
    if (entry.empty()) continue;
    PolicySpec spec;
    const std::size_t colon = entry.find(':');
    const std::string name = entry.substr(0, colon);
    if (name == "mcts") {
      spec.kind = PolicySpec::Kind::Mcts;
      spec.horizon =
          colon == std::string::npos
              ? default_horizon
              : static_cast<int>(parse_int(entry.substr(colon + 1),
                                           "experiment.policies"));
    } else if (name == "random" || name == "patrol") {
      if (colon != std::string::npos) {
        throw ConfigError("experiment.policies: '" + name +
                          "' does not take a horizon");
      }
      spec.kind = name == "random" ? PolicySpec::Kind::Random
                                   : PolicySpec::Kind::Patrol;
      spec.horizon = 0;
    } else {
      throw ConfigError("experiment.policies: unknown policy '" + name + "'");
    }
    out.push_back(spec);
  }
  if (out.empty()) throw ConfigError("experiment.policies: empty list");
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (out[i].kind == out[j].kind && out[i].horizon == out[j].horizon) {
        throw ConfigError("experiment.policies: duplicate entry '" +
                          out[i].label() + "'");
      }
    }
  }
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text,
                                         const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    if (!kv.emplace(key, value).second) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    }
  }

  ExperimentConfig cfg;
  KeyReader r(std::move(kv));

  cfg.room.width = r.number("room.width", cfg.room.width);
  cfg.room.height = r.number("room.height", cfg.room.height);
  cfg.dt.dt = r.number("dt", cfg.dt.dt);
  cfg.robot_speed = r.number("robot.speed", cfg.robot_speed);
  cfg.source_speed = r.number("source.speed", cfg.source_speed);

  cfg.robot_noise.sigma_x = r.number("robot.sigma_x", cfg.robot_noise.sigma_x);
  cfg.robot_noise.sigma_y = r.number("robot.sigma_y", cfg.robot_noise.sigma_y);
  cfg.robot_noise.sigma_v = r.number("robot.sigma_v", cfg.robot_noise.sigma_v);
  cfg.robot_noise.sigma_theta =
      r.number("robot.sigma_theta", cfg.robot_noise.sigma_theta);
  cfg.source_noise.sigma_x = r.number("source.sigma_x", cfg.source_noise.sigma_x);
  cfg.source_noise.sigma_y = r.number("source.sigma_y", cfg.source_noise.sigma_y);
  cfg.source_noise.sigma_v = r.number("source.sigma_v", cfg.source_noise.sigma_v);
  cfg.source_noise.sigma_theta =
      r.number("source.sigma_theta", cfg.source_noise.sigma_theta);

  cfg.num_particles =
      static_cast<int>(r.integer("filter.num_particles", cfg.num_particles));
  cfg.filter_source_sigma_xy =
      r.number("filter.source_sigma_xy", cfg.filter_source_sigma_xy);

  cfg.action_speeds = r.number_list("actions.angular_speeds", cfg.action_speeds);
  cfg.stop_action = r.boolean("actions.stop_action", cfg.stop_action);

  cfg.planner.horizon =
      static_cast<int>(r.integer("planner.horizon", cfg.planner.horizon));
  cfg.planner.budget =
      static_cast<int>(r.integer("planner.budget", cfg.planner.budget));
  cfg.planner.discount = r.number("planner.gamma", cfg.planner.discount);
  cfg.planner.exploration = r.number("planner.c", cfg.planner.exploration);
  cfg.planner.epsilon = r.number("planner.epsilon", cfg.planner.epsilon);
  cfg.planner.plan_particles = static_cast<int>(
      r.integer("planner.plan_particles", cfg.planner.plan_particles));

  cfg.reward_h_lo = r.number("reward.h_lo", cfg.reward_h_lo);
  cfg.reward_h_hi = r.number("reward.h_hi", cfg.reward_h_hi);

  cfg.observation_resolution =
      r.number("observation.resolution", cfg.observation_resolution);
  cfg.table_path = r.text("observation.table", cfg.table_path);
  cfg.synthetic.sigma0 =
      r.number("observation.synthetic.sigma0", cfg.synthetic.sigma0);
  cfg.synthetic.sigma_slope =
      r.number("observation.synthetic.sigma_slope", cfg.synthetic.sigma_slope);
  cfg.synthetic.kappa =
      r.number("observation.synthetic.kappa", cfg.synthetic.kappa);
  cfg.synthetic.max_distance =
      r.number("observation.synthetic.max_distance", cfg.synthetic.max_distance);

  cfg.num_episodes =
      static_cast<int>(r.integer("experiment.num_episodes", cfg.num_episodes));
  cfg.episode_length =
      static_cast<int>(r.integer("experiment.episode_length", cfg.episode_length));
  cfg.base_seed = static_cast<std::uint64_t>(
      r.integer("experiment.base_seed", static_cast<long long>(cfg.base_seed)));
  cfg.threads = static_cast<int>(r.integer("experiment.threads", cfg.threads));

  const auto policies_text = r.take("experiment.policies");
  if (policies_text) {
    cfg.policies = parse_policies(*policies_text, cfg.planner.horizon);
  } else {
    cfg.policies = {PolicySpec{PolicySpec::Kind::Mcts, cfg.planner.horizon},
                    PolicySpec{PolicySpec::Kind::Random, 0},
                    PolicySpec{PolicySpec::Kind::Patrol, 0}};
  }

  r.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return parse(buffer.str(), path);
}

void ExperimentConfig::validate() const {
  require(room.width > 0.0, "room.width: must be > 0");
  require(room.height > 0.0, "room.height: must be > 0");
  require(dt.dt > 0.0, "dt: must be > 0");
  require(robot_speed >= 0.0, "robot.speed: must be >= 0");
  require(source_speed >= 0.0, "source.speed: must be >= 0");

  const auto check_noise = [](const MotionNoise& n, const std::string& who) {
    require(n.sigma_x >= 0.0, who + ".sigma_x: must be >= 0");
    require(n.sigma_y >= 0.0, who + ".sigma_y: must be >= 0");
    require(n.sigma_v >= 0.0, who + ".sigma_v: must be >= 0");
    require(n.sigma_theta >= 0.0, who + ".sigma_theta: must be >= 0");
  };
  check_noise(robot_noise, "robot");
  check_noise(source_noise, "source");

  require(num_particles >= 1, "filter.num_particles: must be >= 1");
  require(filter_source_sigma_xy >= 0.0, "filter.source_sigma_xy: must be >= 0");
  require(!action_speeds.empty(), "actions.angular_speeds: must not be empty");

  planner.validate();

  const RewardNormalizer norm = make_normalizer();
  require(norm.h_hi > norm.h_lo, "reward.h_hi: must be > reward.h_lo");

  try {
    make_grid();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("observation.resolution: ") + e.what());
  }
  if (table_path.empty()) {
    try {
      build_synthetic_table(synthetic);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("observation.synthetic: ") + e.what());
    }
  }

  require(num_episodes >= 1, "experiment.num_episodes: must be >= 1");
  require(episode_length >= 1, "experiment.episode_length: must be >= 1");
  require(threads >= 1, "experiment.threads: must be >= 1");
  require(!policies.empty(), "experiment.policies: must not be empty");
  for (const PolicySpec& p : policies) {
    if (p.kind == PolicySpec::Kind::Mcts) {
      require(p.horizon >= 1, "experiment.policies: mcts horizon must be >= 1");
    }
  }
}

ActionSet ExperimentConfig::make_actions() const {
  ActionSet actions;
  if (stop_action) {
    actions.push_back(Action{0.0, true, 0});
  }
  for (double speed : action_speeds) {
    actions.push_back(Action{speed, false, static_cast<int>(actions.size())});
  }
  return actions;
}

int ExperimentConfig::fixed_action_index() const {
  const ActionSet actions = make_actions();
  int best = 0;
  double best_abs = std::numeric_limits<double>::infinity();
  for (const Action& a : actions) {
    if (a.stop) continue;
    const double mag = std::abs(a.angular_speed);
    if (mag < best_abs) {
      best = a.index;
      best_abs = mag;
    }
  }
  return best;
}

RewardNormalizer ExperimentConfig::make_normalizer() const {
  RewardNormalizer norm = RewardNormalizer::for_room(room.width, room.height);
  if (!std::isnan(reward_h_lo)) norm.h_lo = reward_h_lo;
  if (!std::isnan(reward_h_hi)) norm.h_hi = reward_h_hi;
  return norm;
}

ObservationTable ExperimentConfig::make_table() const {
  if (!table_path.empty()) return load_table_csv(table_path);
  return build_synthetic_table(synthetic);
}

AoaGrid ExperimentConfig::make_grid() const {
  return AoaGrid::with_resolution(observation_resolution);
}

EpisodeConfig ExperimentConfig::make_episode_config() const {
  EpisodeConfig ep;
  ep.room = room;
  ep.dt = dt;
  ep.robot_speed = robot_speed;
  ep.source_speed = source_speed;
  ep.truth_robot = robot_noise;
  ep.truth_source = source_noise;
  ep.filter_robot = robot_noise;
  ep.filter_source = source_noise;
  ep.filter_source.sigma_x = filter_source_sigma_xy;
  ep.filter_source.sigma_y = filter_source_sigma_xy;
  ep.num_particles = num_particles;
  ep.actions = make_actions();
  ep.fixed_action_index = fixed_action_index();
  ep.planner = planner;
  ep.normalizer = make_normalizer();
  ep.episode_length = episode_length;
  return ep;
}

BatchResult run_batch(const ExperimentConfig& config) {
  config.validate();
  const ObservationTable table = config.make_table();
  const AoaGrid grid = config.make_grid();
  const EpisodeConfig episode_cfg = config.make_episode_config();

  const int n_policies = static_cast<int>(config.policies.size());
  const int n_episodes = config.num_episodes;
  const int n_tasks = n_policies * n_episodes;
  std::vector<Episode> slots(static_cast<std::size_t>(n_tasks));

  std::atomic<int> next_task{0};
  const auto worker = [&]() {
    while (true) {
      const int task = next_task.fetch_add(1);
      if (task >= n_tasks) break;
      const int pi = task / n_episodes;
      const int ei = task % n_episodes;
      slots[static_cast<std::size_t>(task)] = run_episode(
          config.policies[static_cast<std::size_t>(pi)], episode_cfg, table,
          grid, config.base_seed + static_cast<std::uint64_t>(ei));
    }
  };

  const int n_threads = std::clamp(config.threads, 1, n_tasks);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  BatchResult result;
  result.raw.reserve(static_cast<std::size_t>(n_tasks) *
                     static_cast<std::size_t>(config.episode_length));
  for (int pi = 0; pi < n_policies; ++pi) {
    const PolicySpec& spec = config.policies[static_cast<std::size_t>(pi)];
    PolicyRunStats stats;
    stats.policy = spec;
    for (int ei = 0; ei < n_episodes; ++ei) {
      const Episode& ep =
          slots[static_cast<std::size_t>(pi * n_episodes + ei)];
      for (int t = 0; t < config.episode_length; ++t) {
        result.raw.push_back(MetricsRecord{
            spec.label(), spec.horizon, ep.seed, t,
            ep.errors[static_cast<std::size_t>(t)]});
      }
      stats.planner.merge(ep.planner_stats);
      stats.degenerate_updates += ep.degenerate_updates;
    }
    result.policy_stats.push_back(std::move(stats));

    for (int t = 0; t < config.episode_length; ++t) {
      double sum = 0.0;
      for (int ei = 0; ei < n_episodes; ++ei) {
        sum += slots[static_cast<std::size_t>(pi * n_episodes + ei)]
                   .errors[static_cast<std::size_t>(t)];
      }
      const double mean = sum / n_episodes;
      double ss = 0.0;
      for (int ei = 0; ei < n_episodes; ++ei) {
        const double d = slots[static_cast<std::size_t>(pi * n_episodes + ei)]
                             .errors[static_cast<std::size_t>(t)] -
                         mean;
        ss += d * d;
      }
      const double sd = n_episodes > 1 ? std::sqrt(ss / (n_episodes - 1)) : 0.0;
      result.aggregates.push_back(
          AggregateRecord{spec.label(), spec.horizon, t, mean, sd});
    }
  }
  return result;
}

std::vector<double> episode_mean_errors(const BatchResult& result,
                                        const std::string& policy_label,
                                        int horizon, int t_begin, int t_end) {
  std::vector<double> means;
  double sum = 0.0;
  int count = 0;
  std::uint64_t current_seed = 0;
  bool in_episode = false;
  for (const MetricsRecord& row : result.raw) {
    if (row.policy != policy_label || row.horizon != horizon) continue;
    if (!in_episode || row.seed != current_seed) {
      if (in_episode && count > 0) means.push_back(sum / count);
      in_episode = true;
      current_seed = row.seed;
      sum = 0.0;
      count = 0;
    }
    if (row.t >= t_begin && row.t < t_end) {
      sum += row.error_m;
      ++count;
    }
  }
  if (in_episode && count > 0) means.push_back(sum / count);
  return means;
}

void write_batch_files(const BatchResult& result, const std::string& prefix) {
  {
    std::ofstream out(prefix + "_raw.csv", std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + prefix + "_raw.csv");
    out << "policy,K,seed,t,error_m\n";
    for (const MetricsRecord& row : result.raw) {
      out << row.policy << ',' << row.horizon << ',' << row.seed << ','
          << row.t << ',' << g9(row.error_m) << '\n';
    }
    if (!out) throw IoError("write failed: " + prefix + "_raw.csv");
  }
  {
    std::ofstream out(prefix + "_summary.csv", std::ios::binary);
    if (!out) {
      throw IoError("cannot open for writing: " + prefix + "_summary.csv");
    }
    out << "policy,K,t,mean_error_m,std_error_m\n";
    for (const AggregateRecord& row : result.aggregates) {
      out << row.policy << ',' << row.horizon << ',' << row.t << ','
          << g9(row.mean_error_m) << ',' << g9(row.std_error_m) << '\n';
    }
    if (!out) throw IoError("write failed: " + prefix + "_summary.csv");
  }
  {
    std::ofstream out(prefix + "_planner.csv", std::ios::binary);
    if (!out) {
      throw IoError("cannot open for writing: " + prefix + "_planner.csv");
    }
    out << "policy,K,g_min,g_max,backups,expansions,degenerate_updates\n";
    for (const PolicyRunStats& s : result.policy_stats) {
      const bool any = s.planner.backups > 0;
      out << s.policy.label() << ',' << s.policy.horizon << ','
          << g17(any ? s.planner.g_min : 0.0) << ','
          << g17(any ? s.planner.g_max : 0.0) << ',' << s.planner.backups
          << ',' << s.planner.expansions << ',' << s.degenerate_updates
          << '\n';
    }
    if (!out) throw IoError("write failed: " + prefix + "_planner.csv");
  }
}

namespace {

int run_simulate(const ExperimentConfig& config, const PolicySpec& policy,
                 std::uint64_t seed) {
  const ObservationTable table = config.make_table();
  const AoaGrid grid = config.make_grid();
  const EpisodeConfig episode_cfg = config.make_episode_config();

  std::printf("# policy=%s", policy.label().c_str());
  if (policy.kind == PolicySpec::Kind::Mcts) std::printf(" K=%d", policy.horizon);
  std::printf(" seed=%llu steps=%d particles=%d\n",
              static_cast<unsigned long long>(seed), config.episode_length,
              config.num_particles);

  const Episode ep = run_episode(policy, episode_cfg, table, grid, seed);
  double sum = 0.0;
  for (int t = 0; t < config.episode_length; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    const WorldState& w = ep.true_states[ti];
    if (t == 0) {
      std::printf("t=%-3d action=   -    z=  -    ", t);
    } else {
      char action_buf[16];
      if (ep.actions[ti].stop) {
        std::snprintf(action_buf, sizeof(action_buf), "stop");
      } else {
        std::snprintf(action_buf, sizeof(action_buf), "%+.0f",
                      ep.actions[ti].angular_speed);
      }
      std::printf("t=%-3d action=%6s z=%5.1f ", t, action_buf,
                  ep.observations[ti].value);
    }
    std::printf(
        "robot=(%6.3f,%6.3f,%7.1f) source=(%6.3f,%6.3f) error=%s\n",
        w.robot.x, w.robot.y, w.robot.theta, w.source.x, w.source.y,
        g9(ep.errors[ti]).c_str());
    sum += ep.errors[ti];
  }
  std::printf("# mean_error=%s final_error=%s degenerate_updates=%d\n",
              g9(sum / config.episode_length).c_str(),
              g9(ep.errors.back()).c_str(), ep.degenerate_updates);
  return 0;
}

int run_batch_command(const ExperimentConfig& config,
                      const std::string& prefix) {
  const BatchResult result = run_batch(config);
  write_batch_files(result, prefix);
  std::printf("wrote %s_raw.csv (%zu rows), %s_summary.csv (%zu rows), %s_planner.csv\n",
              prefix.c_str(), result.raw.size(), prefix.c_str(),
              result.aggregates.size(), prefix.c_str());
  for (const PolicyRunStats& s : result.policy_stats) {
    const std::vector<double> means =
        episode_mean_errors(result, s.policy.label(), s.policy.horizon, 0,
                            config.episode_length);
    double mean = 0.0;
    for (double m : means) mean += m;
    if (!means.empty()) mean /= static_cast<double>(means.size());
    std::printf("policy=%s K=%d mean_error=%s\n", s.policy.label().c_str(),
                s.policy.horizon, g9(mean).c_str());
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"active acoustic source tracking: simulator, planner, baselines"};
  app.require_subcommand(1);

  std::string config_path;
  std::string table_path;
  std::string out_prefix = "metrics";
  std::string table_out = "table.csv";
  std::string policy_name = "mcts";
  std::uint64_t seed = 0;
  int horizon = 0;
  int threads = 0;

  CLI::App* sim = app.add_subcommand("simulate", "Run one episode, log each step");
  sim->add_option("--config", config_path, "experiment config file")->required();
  sim->add_option("--table", table_path, "observation table CSV");
  sim->add_option("--seed", seed, "episode seed (default: base seed)");
  sim->add_option("--policy", policy_name, "mcts|random|patrol")
      ->check(CLI::IsMember({"mcts", "random", "patrol"}));
  sim->add_option("--horizon", horizon, "planning depth override");

  CLI::App* batch = app.add_subcommand("batch", "Run the configured batch");
  batch->add_option("--config", config_path, "experiment config file")->required();
  batch->add_option("--table", table_path, "observation table CSV");
  batch->add_option("--out", out_prefix, "output file prefix");
  batch->add_option("--seed", seed, "base seed override");
  batch->add_option("--threads", threads, "worker thread count");

  CLI::App* gen = app.add_subcommand("gen-table", "Write a synthetic observation table");
  gen->add_option("--config", config_path, "config with generator settings");
  gen->add_option("--out", table_out, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      SyntheticTableParams params;
      if (!config_path.empty()) {
        params = ExperimentConfig::load(config_path).synthetic;
      }
      save_table_csv(build_synthetic_table(params), table_out);
      std::printf("wrote %s\n", table_out.c_str());
      return 0;
    }

    ExperimentConfig config = ExperimentConfig::load(config_path);
    if (!table_path.empty()) config.table_path = table_path;
    if (sim->parsed()) {
      if (sim->count("--seed") == 0) seed = config.base_seed;
      PolicySpec policy;
      if (policy_name == "random") {
        policy = {PolicySpec::Kind::Random, 0};
      } else if (policy_name == "patrol") {
        policy = {PolicySpec::Kind::Patrol, 0};
      } else {
        policy = {PolicySpec::Kind::Mcts,
                  horizon > 0 ? horizon : config.planner.horizon};
      }
      config.validate();
      return run_simulate(config, policy, seed);
    }

    if (batch->count("--seed") > 0) config.base_seed = seed;
    if (threads > 0) config.threads = threads;
    config.validate();
    return run_batch_command(config, out_prefix);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace actrack
