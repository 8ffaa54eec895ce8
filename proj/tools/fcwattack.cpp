#include "fcw/config.hpp"
#include "fcw/harness.hpp"
#include "fcw/io.hpp"
#include "fcw/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fcw;

namespace {

constexpr int kUsageError = 1;
constexpr int kRunError = 2;

/// Failures while running an attack, as opposed to setting one up.
struct RunFailure : Error {
  using Error::Error;
};

struct Flags {
  std::string config;
  std::string output_dir;
  std::optional<std::string> scenario;
  std::optional<std::string> trace;
  std::optional<std::uint64_t> seed;
  bool zero_noise = false;
  std::optional<std::string> strategy;
  std::optional<double> stealthy_frac;
  std::optional<std::string> delta;
  std::optional<double> lambda;
  std::optional<int> target_start;
  std::optional<int> target_length;
  std::optional<std::string> target_light;
  std::vector<double> fractions;
  std::vector<std::string> deltas;
  std::vector<std::string> strategies;
};

void add_scenario_options(CLI::App* app, Flags& f, bool allow_trace) {
  auto* sc = app->add_option("--scenario", f.scenario, "Scenario preset: mio-10 or mio+1");
  if (allow_trace) app->add_option("--trace", f.trace, "Read measurements from a trace CSV instead")->excludes(sc);
  app->add_option("--seed", f.seed, "Noise seed");
  app->add_flag("--zero-noise", f.zero_noise, "Disable all sensor noise, dropouts and outliers");
}

void add_attack_options(CLI::App* app, Flags& f) {
  app->add_option("--strategy", f.strategy, "mpc, greedy or none");
  app->add_option("--stealthy-frac", f.stealthy_frac, "Fraction of the full stealthy interval to use");
  app->add_option("--delta", f.delta, "Bound on each manipulated component (number or inf)");
  app->add_option("--lambda", f.lambda, "Slack penalty weight");
  app->add_option("--target-start", f.target_start, "First step of the target interval");
  app->add_option("--target-length", f.target_length, "Number of target steps");
  app->add_option("--target-light", f.target_light, "Desired light over the target interval: G, Y or R");
}

RunConfig resolve(const Flags& f) {
  RunConfig c;
  if (!f.config.empty()) apply_config_file(c, f.config);
  try {
    if (f.scenario) {
      const std::uint64_t seed = c.scenario.seed;
      c.scenario = scenario_preset(*f.scenario);
      c.scenario.seed = seed;
      c.trace_path.reset();
    }
    if (f.trace) c.trace_path = *f.trace;
    if (f.seed) c.scenario.seed = *f.seed;
    if (f.zero_noise) c.scenario = c.scenario.noiseless();
    if (f.strategy) c.strategy = parse_strategy(*f.strategy);
    if (f.stealthy_frac) c.stealthy_fraction = *f.stealthy_frac;
    if (f.delta) c.settings.delta = parse_delta(*f.delta);
    if (f.lambda) c.settings.lambda = *f.lambda;
    if (f.target_start || f.target_length || f.target_light) {
      AttackGoal g = c.resolved_goal();
      if (f.target_start) g.start = *f.target_start;
      if (f.target_length) g.length = *f.target_length;
      if (f.target_light) {
        if (f.target_light->size() != 1) throw ConfigError("--target-light must be G, Y or R");
        g.light = parse_light((*f.target_light)[0]);
      }
      c.goal = g;
    }
    if (!f.fractions.empty()) c.fractions = f.fractions;
    if (!f.deltas.empty()) {
      c.deltas.clear();
      for (const std::string& d : f.deltas) c.deltas.push_back(parse_delta(d));
    }
    if (!f.strategies.empty()) {
      c.sweep_strategies.clear();
      for (const std::string& s : f.strategies) c.sweep_strategies.push_back(parse_strategy(s));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!f.output_dir.empty()) c.output_dir = f.output_dir;
  if (!c.output_dir) {
    const char* env = std::getenv("FCW_OUTPUT_DIR");
    c.output_dir = env && *env ? env : "fcw-out";
  }
  return c;
}

fs::path output_dir(const RunConfig& c) {
  const fs::path dir(*c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

Experiment setup(const RunConfig& c) {
  std::optional<Trace> raw;
  if (c.trace_path) {
    std::ifstream in(*c.trace_path);
    if (!in) throw ConfigError("cannot open trace '" + *c.trace_path + "'");
    try {
      raw = read_trace_csv(in);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  try {
    return prepare_experiment(c.scenario, c.kf, c.resolved_goal(), c.settings, std::move(raw));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

int cmd_gen(const RunConfig& c) {
  if (c.trace_path) throw ConfigError("gen synthesizes a trace; --trace is not accepted");
  const Trace tr = synthesize_trace(c.scenario);
  const fs::path dir = output_dir(c);
  auto t = open_output(dir / "trace.csv");
  write_trace_csv(t, tr);
  auto g = open_output(dir / "ground_truth.csv");
  write_ground_truth_csv(g, tr);
  std::cout << "wrote " << tr.frames.size() << " steps of " << c.scenario.name << " to " << dir.string() << '\n';
  return 0;
}

int cmd_attack(const RunConfig& c) {
  const Experiment e = setup(c);
  AttackConfig cfg;
  try {
    cfg = make_attack_config(e, c.stealthy_fraction);
  } catch (const Error& ex) {
    throw ConfigError(ex.what());
  }
  const fs::path dir = output_dir(c);
  AttackResult r;
  try {
    r = run_attack(e, c.strategy, cfg);
  } catch (const Error& ex) {
    throw RunFailure(ex.what());
  }
  const Outcome o = end_to_end_outcome(e.scenario, r.lights_after, e.settings.h_star);
  auto s = open_output(dir / "attack_summary.json");
  write_attack_summary(s, e, r, o);
  auto st = open_output(dir / "attack_steps.csv");
  write_attack_steps(st, r);
  auto p = open_output(dir / "plot_data.csv");
  write_plot_data(p, r);
  std::cout << r.strategy << ": target [" << cfg.target.first << ", " << cfg.target.last << "], stealthy length "
            << cfg.stealthy.size() << ", V_target=" << r.metrics.v_target << ", V_stealthy=" << r.metrics.v_stealthy
            << ", J=" << format_number(r.metrics.j) << ", "
            << (o.crash.collided ? o.hazard + " collision" : std::string("no collision")) << '\n';
  return 0;
}

void print_table(const std::vector<SweepRow>& rows) {
  std::printf("%-9s %-7s %9s %9s %8s %8s %12s %12s %10s\n", "sweep", "strategy", "fraction", "delta", "V_target",
              "V_stealthy", "J1", "J", "collision");
  for (const SweepRow& r : rows) {
    if (!r.error.empty()) {
      std::printf("%-9s %-7s %9.3g %9s  failed: %s\n", r.sweep.c_str(), to_string(r.strategy).c_str(), r.fraction,
                  format_number(r.delta).c_str(), r.error.c_str());
      continue;
    }
    std::printf("%-9s %-7s %9.3g %9s %8d %8d %12.4g %12.4g %10s\n", r.sweep.c_str(), to_string(r.strategy).c_str(),
                r.fraction, format_number(r.delta).c_str(), r.metrics.v_target, r.metrics.v_stealthy, r.metrics.j1,
                r.metrics.j, r.outcome.crash.collided ? "yes" : "no");
  }
}

int write_rows(const RunConfig& c, const Experiment& e, const std::vector<SweepRow>& rows, const std::string& stem) {
  const fs::path dir = output_dir(c);
  auto csv = open_output(dir / (stem + ".csv"));
  write_sweep_csv(csv, rows);
  auto js = open_output(dir / (stem + "_summary.json"));
  write_sweep_json(js, e, rows);
  print_table(rows);
  int failed = 0;
  for (const SweepRow& r : rows) failed += !r.error.empty();
  if (failed) std::cerr << failed << " of " << rows.size() << " sweep points failed; see the error column\n";
  return 0;
}

int cmd_sweep(const RunConfig& c) {
  if (c.fractions.empty() && c.deltas.empty())
    throw ConfigError("empty sweep: give --fractions and/or --deltas (or a sweep section in the config)");
  const Experiment e = setup(c);
  std::vector<SweepRow> rows;
  if (!c.fractions.empty()) rows = planning_sweep(e, c.sweep_strategies, c.fractions);
  if (!c.deltas.empty()) {
    const Strategy s = c.strategy == Strategy::none ? Strategy::mpc : c.strategy;
    for (SweepRow& r : delta_sweep(e, c.deltas, s, c.stealthy_fraction)) rows.push_back(std::move(r));
  }
  return write_rows(c, e, rows, "sweep");
}

int cmd_compare(const RunConfig& c) {
  const Experiment e = setup(c);
  const std::vector<double> fractions = c.fractions.empty() ? std::vector<double>{0, 0.25, 0.5, 0.75, 1} : c.fractions;
  return write_rows(c, e, planning_sweep(e, {Strategy::mpc, Strategy::greedy}, fractions), "compare");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"False-data-injection attacks on a Kalman-filter forward collision warning pipeline"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "JSON config with scenario, kf, attack and sweep sections")
      ->check(CLI::ExistingFile);
  app.add_option("--output-dir", f.output_dir, "Output directory (default: $FCW_OUTPUT_DIR or ./fcw-out)");

  auto* gen = app.add_subcommand("gen", "Synthesize a measurement trace and its ground truth");
  add_scenario_options(gen, f, false);

  auto* attack = app.add_subcommand("attack", "Run one attack and write its result files");
  add_scenario_options(attack, f, true);
  add_attack_options(attack, f);

  auto* sweep = app.add_subcommand("sweep", "Planning-length and/or delta sweeps");
  add_scenario_options(sweep, f, true);
  add_attack_options(sweep, f);
  sweep->add_option("--fractions", f.fractions, "Stealthy-interval fractions for the planning sweep");
  sweep->add_option("--deltas", f.deltas, "Delta values for the delta sweep (numbers or inf)");
  sweep->add_option("--strategies", f.strategies, "Strategies for the planning sweep");

  auto* compare = app.add_subcommand("compare", "MPC against greedy over the planning fractions");
  add_scenario_options(compare, f, true);
  add_attack_options(compare, f);
  compare->add_option("--fractions", f.fractions, "Stealthy-interval fractions");

  for (auto* sub : {gen, attack, sweep, compare}) {
    sub->add_option("--config", f.config, "JSON config")->check(CLI::ExistingFile);
    sub->add_option("--output-dir", f.output_dir, "Output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    const RunConfig c = resolve(f);
    if (*gen) return cmd_gen(c);
    if (*attack) return cmd_attack(c);
    if (*sweep) return cmd_sweep(c);
    return cmd_compare(c);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "attack failed: " << e.what() << '\n';
    return kRunError;
  }
}
