#include <filesystem>
#include <fstream>
#include <sstream>

#include "actrack/harness.hpp"
#include "doctest.h"

using namespace actrack;

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / "actrack_harness_test";
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kSmallBatchConfig =
    "filter.num_particles = 40\n"
    "planner.budget = 20\n"
    "planner.plan_particles = 20\n"
    "experiment.num_episodes = 3\n"
    "experiment.episode_length = 10\n"
    "experiment.policies = random, patrol\n"
    "experiment.base_seed = 5\n";

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults carry the reference parameter set") {
    const ExperimentConfig cfg = ExperimentConfig::parse("", "test");
    CHECK(cfg.room.width == 7.0);
    CHECK(cfg.room.height == 5.0);
    CHECK(cfg.dt.dt == 1.0);
    CHECK(cfg.robot_speed == 0.3);
    CHECK(cfg.robot_noise.sigma_theta == 5.0);
    CHECK(cfg.source_noise.sigma_v == 0.025);
    CHECK(cfg.source_noise.sigma_theta == 10.0);
    CHECK(cfg.num_particles == 1000);
    CHECK(cfg.filter_source_sigma_xy == 0.1);
    CHECK(cfg.planner.discount == 0.9);
    CHECK(cfg.planner.exploration == 1.75);
    CHECK(cfg.planner.budget == 500);
    CHECK(cfg.policies.size() == 3);
  }

  SUBCASE("values, comments and lists are applied") {
    const ExperimentConfig cfg = ExperimentConfig::parse(
        "# comment line\n"
        "room.width = 9.5\n"
        "planner.gamma = 0.8  # trailing comment\n"
        "actions.angular_speeds = -30, 0, 30, 60\n"
        "actions.stop_action = false\n"
        "experiment.policies = mcts:4, mcts:1, random\n",
        "test");
    CHECK(cfg.room.width == 9.5);
    CHECK(cfg.planner.discount == 0.8);
    CHECK(cfg.action_speeds.size() == 4);
    CHECK_FALSE(cfg.stop_action);
    REQUIRE(cfg.policies.size() == 3);
    CHECK(cfg.policies[0].kind == PolicySpec::Kind::Mcts);
    CHECK(cfg.policies[0].horizon == 4);
    CHECK(cfg.policies[1].horizon == 1);
    CHECK(cfg.policies[2].kind == PolicySpec::Kind::Random);
  }

  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse("room.depth = 3\n", "test"),
                         "unknown key: room.depth", ConfigError);
  }

  SUBCASE("duplicate keys are rejected") {
    CHECK_THROWS_AS(ExperimentConfig::parse("dt = 1\ndt = 2\n", "test"),
                    ConfigError);
  }

  SUBCASE("validation errors name the field") {
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse("planner.gamma = 1.5\n", "test"),
                         "planner.gamma: must lie in [0, 1]", ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("room.width = -1\n", "test"),
                    ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::parse("experiment.policies = teleport\n", "test"),
        ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::parse("reward.h_lo = 5\nreward.h_hi = 1\n", "test"),
        ConfigError);
    CHECK_THROWS_AS(
        ExperimentConfig::parse("observation.resolution = 7\n", "test"),
        ConfigError);
  }

  SUBCASE("missing config file raises an I/O error") {
    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/actrack.cfg"), IoError);
  }
}

TEST_CASE("action set construction") {
  ExperimentConfig cfg = ExperimentConfig::parse("", "test");

  SUBCASE("default: stop plus three angular speeds") {
    const ActionSet actions = cfg.make_actions();
    REQUIRE(actions.size() == 4);
    CHECK(actions[0].stop);
    CHECK(actions[1].angular_speed == -45.0);
    CHECK(actions[2].angular_speed == 0.0);
    CHECK_FALSE(actions[2].stop);
    CHECK(actions[3].angular_speed == 45.0);
    for (std::size_t i = 0; i < actions.size(); ++i) {
      CHECK(actions[i].index == static_cast<int>(i));
    }
    CHECK(cfg.fixed_action_index() == 2);  // the non-stop zero turn
  }

  SUBCASE("stop action disabled") {
    cfg.stop_action = false;
    const ActionSet actions = cfg.make_actions();
    REQUIRE(actions.size() == 3);
    CHECK_FALSE(actions[0].stop);
    CHECK(cfg.fixed_action_index() == 1);
  }

  SUBCASE("derived reward bounds cover the room") {
    const RewardNormalizer norm = cfg.make_normalizer();
    CHECK(norm.h_hi == doctest::Approx(std::log(35.0) + std::log(360.0)));
    CHECK(norm.h_lo ==
          doctest::Approx(std::log(2.0 * kPi * std::exp(1.0) * 0.0025)));
  }
}

TEST_CASE("run_batch") {
  const ExperimentConfig cfg = ExperimentConfig::parse(kSmallBatchConfig, "test");

  SUBCASE("row counts follow policies x seeds x steps") {
    const BatchResult result = run_batch(cfg);
    CHECK(result.raw.size() == 2 * 3 * 10);
    CHECK(result.aggregates.size() == 2 * 10);
    CHECK(result.policy_stats.size() == 2);
  }

  SUBCASE("aggregates equal the arithmetic mean of raw rows") {
    const BatchResult result = run_batch(cfg);
    for (const AggregateRecord& agg : result.aggregates) {
      double sum = 0.0;
      int n = 0;
      for (const MetricsRecord& row : result.raw) {
        if (row.policy == agg.policy && row.horizon == agg.horizon &&
            row.t == agg.t) {
          sum += row.error_m;
          ++n;
        }
      }
      REQUIRE(n == 3);
      CHECK(agg.mean_error_m == doctest::Approx(sum / n).epsilon(1e-12));
    }
  }

  SUBCASE("per-episode means pick out the requested window") {
    const BatchResult result = run_batch(cfg);
    const std::vector<double> means =
        episode_mean_errors(result, "random", 0, 5, 10);
    REQUIRE(means.size() == 3);
    double check = 0.0;
    for (const MetricsRecord& row : result.raw) {
      if (row.policy == "random" && row.seed == 5 && row.t >= 5) {
        check += row.error_m;
      }
    }
    CHECK(means[0] == doctest::Approx(check / 5.0).epsilon(1e-12));
  }

  SUBCASE("identical trajectories across policies up to the fixed actions") {
    const BatchResult result = run_batch(cfg);
    for (std::uint64_t seed = 5; seed < 8; ++seed) {
      for (int t = 0; t <= 2; ++t) {
        double values[2];
        int found = 0;
        for (const MetricsRecord& row : result.raw) {
          if (row.seed == seed && row.t == t) {
            values[found++] = row.error_m;
          }
        }
        REQUIRE(found == 2);
        CHECK(values[0] == values[1]);
      }
    }
  }

  SUBCASE("outputs are byte-identical across runs and thread counts") {
    TempDir tmp;
    ExperimentConfig threaded = cfg;
    const BatchResult a = run_batch(threaded);
    write_batch_files(a, (tmp.path / "a").string());
    threaded.threads = 2;
    const BatchResult b = run_batch(threaded);
    write_batch_files(b, (tmp.path / "b").string());
    CHECK(read_file(tmp.path / "a_raw.csv") == read_file(tmp.path / "b_raw.csv"));
    CHECK(read_file(tmp.path / "a_summary.csv") ==
          read_file(tmp.path / "b_summary.csv"));
    CHECK(read_file(tmp.path / "a_planner.csv") ==
          read_file(tmp.path / "b_planner.csv"));
    CHECK(read_file(tmp.path / "a_raw.csv").substr(0, 22) ==
          "policy,K,seed,t,error_");
  }
}

TEST_CASE("command line interface") {
  TempDir tmp;
  const auto run = [](std::initializer_list<const char*> args) {
    std::vector<const char*> argv = {"actrack"};
    argv.insert(argv.end(), args.begin(), args.end());
    return cli_main(static_cast<int>(argv.size()), argv.data());
  };

  const fs::path cfg_path = tmp.path / "exp.cfg";
  {
    std::ofstream out(cfg_path);
    out << kSmallBatchConfig;
  }
  const fs::path table_path = tmp.path / "table.csv";
  const fs::path out_prefix = tmp.path / "metrics";

  SUBCASE("gen-table then batch produces the output files") {
    CHECK(run({"gen-table", "--out", table_path.c_str()}) == 0);
    CHECK(fs::exists(table_path));
    const ObservationTable table = load_table_csv(table_path.string());
    CHECK(table.distance_knots.size() == 19);
    CHECK(table.aoa_knots.size() == 37);

    CHECK(run({"batch", "--config", cfg_path.c_str(), "--table",
               table_path.c_str(), "--out", out_prefix.c_str()}) == 0);
    CHECK(fs::exists(tmp.path / "metrics_raw.csv"));
    CHECK(fs::exists(tmp.path / "metrics_summary.csv"));
    CHECK(fs::exists(tmp.path / "metrics_planner.csv"));
  }

  SUBCASE("simulate runs one episode") {
    CHECK(run({"simulate", "--config", cfg_path.c_str(), "--policy", "random",
               "--seed", "9"}) == 0);
  }

  SUBCASE("missing config file exits with the I/O code") {
    CHECK(run({"batch", "--config", (tmp.path / "absent.cfg").c_str()}) == 2);
  }

  SUBCASE("invalid field exits with the config code") {
    const fs::path bad = tmp.path / "bad.cfg";
    {
      std::ofstream out(bad);
      out << "planner.gamma = 1.7\n";
    }
    CHECK(run({"batch", "--config", bad.c_str()}) == 1);
    CHECK(run({"simulate", "--config", bad.c_str()}) == 1);
  }

  SUBCASE("unknown policy name is a usage error") {
    CHECK(run({"simulate", "--config", cfg_path.c_str(), "--policy",
               "teleport"}) == 1);
  }
}
