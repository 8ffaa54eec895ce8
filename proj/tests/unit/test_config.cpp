#include "fcw/config.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace fcw;
namespace fs = std::filesystem;

TEST(Config, EmptyDocumentKeepsDefaults) {
  RunConfig c;
  apply_config_json(c, "{}");
  EXPECT_EQ(c.scenario.name, "mio-10");
  EXPECT_EQ(c.strategy, Strategy::mpc);
  EXPECT_TRUE(std::isinf(c.settings.delta));
  EXPECT_EQ(c.settings.lambda, 1e10);
  EXPECT_EQ(c.settings.h_star, 24);
}

TEST(Config, SectionsApply) {
  RunConfig c;
  apply_config_json(c, R"({
    "scenario": {"preset": "mio+1", "seed": 9, "noise": false},
    "kf": {"accel_intensity": 2.5, "sigma0": 10},
    "attack": {"strategy": "greedy", "delta": "inf", "lambda": 1e6, "d_bounds": [0, 60],
               "target_light": "G", "target_start": 120, "target_length": 5},
    "sweep": {"fractions": [0, 0.5], "deltas": [5, "inf"], "strategies": ["mpc"]},
    "output_dir": "out"
  })");
  EXPECT_EQ(c.scenario.name, "mio+1");
  EXPECT_EQ(c.scenario.seed, 9u);
  EXPECT_EQ(c.scenario.dropout, 0.0);
  EXPECT_EQ(*c.scenario.trailing_gap, 7.0);
  EXPECT_EQ(c.kf.accel_intensity, 2.5);
  EXPECT_EQ(c.kf.sigma0, 10.0);
  EXPECT_EQ(c.strategy, Strategy::greedy);
  EXPECT_TRUE(std::isinf(c.settings.delta));
  EXPECT_EQ(c.settings.lambda, 1e6);
  EXPECT_EQ(c.settings.d_max, 60.0);
  const AttackGoal g = c.resolved_goal();
  EXPECT_EQ(g.light, Light::green);
  EXPECT_EQ(*g.start, 120);
  EXPECT_EQ(g.length, 5);
  EXPECT_EQ(c.fractions, (std::vector<double>{0, 0.5}));
  EXPECT_TRUE(std::isinf(c.deltas[1]));
  EXPECT_EQ(c.sweep_strategies, (std::vector<Strategy>{Strategy::mpc}));
  EXPECT_EQ(*c.output_dir, "out");
}

TEST(Config, UnknownKeysRejected) {
  RunConfig c;
  EXPECT_THROW(apply_config_json(c, R"({"attack": {"lamda": 1}})"), ConfigError);
  EXPECT_THROW(apply_config_json(c, R"({"extra": 1})"), ConfigError);
}

TEST(Config, MalformedValuesRejected) {
  RunConfig c;
  EXPECT_THROW(apply_config_json(c, "{"), ConfigError);
  EXPECT_THROW(apply_config_json(c, R"({"attack": {"delta": "big"}})"), ConfigError);
  EXPECT_THROW(apply_config_json(c, R"({"attack": {"d_bounds": [1]}})"), ConfigError);
  EXPECT_THROW(apply_config_json(c, R"({"attack": {"strategy": "fast"}})"), ConfigError);
  EXPECT_THROW(apply_config_json(c, R"({"scenario": {"preset": "mio-3"}})"), ConfigError);
  EXPECT_THROW(apply_config_file(c, "/nonexistent/config.json"), ConfigError);
}

TEST(Config, DeltaParsing) {
  EXPECT_EQ(parse_delta("2.5"), 2.5);
  EXPECT_TRUE(std::isinf(parse_delta("inf")));
  EXPECT_THROW(parse_delta("-1"), ConfigError);
  EXPECT_THROW(parse_delta("wide"), ConfigError);
}

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("fcw-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FCWATTACK_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, UsageErrorsExitWithOne) {
  TempDir d;
  EXPECT_EQ(run_cli("attack --no-such-flag"), 1);
  EXPECT_EQ(run_cli("attack --scenario mio-7 --output-dir " + d.path.string()), 1);
  EXPECT_EQ(run_cli("sweep --zero-noise --output-dir " + d.path.string()), 1);
  const fs::path bad = d.path / "bad.json";
  std::ofstream(bad) << R"({"attack": {"bogus": 1}})";
  EXPECT_EQ(run_cli("attack --config " + bad.string() + " --output-dir " + d.path.string()), 1);
}

TEST(Cli, RunFailureExitsWithTwo) {
  TempDir d;
  EXPECT_EQ(run_cli("attack --zero-noise --strategy greedy --target-light Y --output-dir " + d.path.string()), 2);
  EXPECT_EQ(run_cli("attack --zero-noise --target-start 290 --output-dir " + d.path.string()), 1);
}

TEST(Cli, GenIsDeterministic) {
  TempDir a, b;
  ASSERT_EQ(run_cli("gen --scenario mio+1 --seed 3 --output-dir " + a.path.string()), 0);
  ASSERT_EQ(run_cli("gen --scenario mio+1 --seed 3 --output-dir " + b.path.string()), 0);
  for (const char* f : {"trace.csv", "ground_truth.csv"}) {
    ASSERT_TRUE(fs::exists(a.path / f)) << f;
    EXPECT_EQ(slurp(a.path / f), slurp(b.path / f)) << f;
  }
}

TEST(Cli, AttackFromGeneratedTrace) {
  TempDir d;
  ASSERT_EQ(run_cli("gen --zero-noise --output-dir " + d.path.string()), 0);
  const fs::path out = d.path / "attack";
  ASSERT_EQ(run_cli("attack --strategy greedy --stealthy-frac 0 --trace " + (d.path / "trace.csv").string() +
                    " --output-dir " + out.string()),
            0);
  for (const char* f : {"attack_summary.json", "attack_steps.csv", "plot_data.csv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  // Without planning the first target step is out of reach: its estimate predates any manipulation.
  EXPECT_NE(slurp(out / "attack_summary.json").find("\"v_target\": 1,"), std::string::npos);
}
