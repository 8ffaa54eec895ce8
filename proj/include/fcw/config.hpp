#pragma once

#include "fcw/harness.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fcw {

/// Raised for malformed or inconsistent configuration; the CLI maps it to exit code 1.
class ConfigError : public Error {
public:
  using Error::Error;
};

struct RunConfig {
  ScenarioSpec scenario = mio_minus_10();
  std::optional<std::string> trace_path;  ///< replaces the synthesized trace when set
  KfNoise kf;
  std::optional<AttackGoal> goal;  ///< unset means default_goal(scenario)
  AttackSettings settings;
  Strategy strategy = Strategy::mpc;
  double stealthy_fraction = 1.0;
  std::vector<double> fractions;
  std::vector<double> deltas;
  std::vector<Strategy> sweep_strategies = {Strategy::mpc, Strategy::greedy};
  std::optional<std::string> output_dir;

  AttackGoal resolved_goal() const { return goal.value_or(default_goal(scenario)); }
};

/// Applies a JSON document with optional sections "scenario", "kf", "attack", "sweep" and key "output_dir".
/// Unknown keys are rejected. A "preset" in the scenario section resets the scenario before other keys apply.
void apply_config_json(RunConfig& cfg, const std::string& text);
void apply_config_file(RunConfig& cfg, const std::string& path);

/// Numbers, or "inf" for an unbounded Δ.
double parse_delta(const std::string& s);

}  // namespace fcw
