#pragma once

#include "fcw/attacker.hpp"
#include "fcw/dynamics.hpp"
#include "fcw/scenario.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fcw {

enum class Strategy { mpc, greedy, none };

std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& s);

struct AttackGoal {
  Light light = Light::green;
  std::optional<int> start;  ///< first step of T†; unset means the first red of the unattacked run
  int length = 10;
};

/// Hide the first red for MIO-10 style scenarios, force red on [100, 139] when a trailing vehicle exists.
AttackGoal default_goal(const ScenarioSpec& s);

struct AttackSettings {
  double delta = std::numeric_limits<double>::infinity();
  double lambda = 1e10;
  double epsilon = 1e-3;
  double d_min = 0.0, d_max = 75.0;
  double v_min = -30.0, v_max = 30.0;
  double qp_tol = 1e-8;
  int h_star = 24;
};

/// Everything an attack run needs, computed once per scenario.
struct Experiment {
  ScenarioSpec scenario;
  KfNoise noise;
  KfModel model;
  Mat6 sigma0 = Mat6::Identity();
  Trace raw;
  std::vector<MeasurementFrame> frames;  ///< preprocessed
  std::vector<Light> baseline_lights;
  Interval target;
  Light target_light = Light::green;
  AttackSettings settings;
};

/// Synthesizes (or takes) the raw trace, preprocesses it and resolves the target window.
Experiment prepare_experiment(const ScenarioSpec& scenario, const KfNoise& noise, const AttackGoal& goal,
                              const AttackSettings& settings, std::optional<Trace> raw = std::nullopt,
                              const PreprocessOptions& pre = {});

/// Tˢ covering round(fraction·(T†.first-2)) steps right before T†.
Interval stealthy_window(const Interval& target, double fraction);

AttackConfig make_attack_config(const Experiment& e, double stealthy_fraction,
                                std::optional<double> delta = std::nullopt);

AttackResult run_attack(const Experiment& e, Strategy s, const AttackConfig& cfg);

struct Outcome {
  std::string hazard;  ///< "forward" without a trailing vehicle, "rear" otherwise
  std::optional<int> brake_onset;
  std::optional<int> brake_release;
  double brake_duration = 0;  ///< seconds
  CrashReport crash;
};

/// Drives the driver model with `lights` and checks the scenario's hazard for a collision.
Outcome end_to_end_outcome(const ScenarioSpec& s, const std::vector<Light>& lights, int h_star = 24);

struct SweepRow {
  std::string sweep;  ///< "planning" or "delta"
  Strategy strategy = Strategy::mpc;
  double fraction = 1.0;
  Interval stealthy;
  double delta = 0;
  Metrics metrics;
  int achieved_targets = 0;  ///< |T†| - V†
  Outcome outcome;
  std::string error;  ///< non-empty when the run failed
};

/// Runs each (strategy, fraction) pair; points run concurrently and come back in input order.
std::vector<SweepRow> planning_sweep(const Experiment& e, const std::vector<Strategy>& strategies,
                                     const std::vector<double>& fractions);

std::vector<SweepRow> delta_sweep(const Experiment& e, const std::vector<double>& deltas,
                                  Strategy s = Strategy::mpc, double fraction = 1.0);

/// True when each value is at most the previous one plus rel_tol·(1+|previous|).
bool nonincreasing(const std::vector<double>& values, double rel_tol = 1e-6);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
/// Summary with the scenario, target window and per-row metrics.
void write_sweep_json(std::ostream& os, const Experiment& e, const std::vector<SweepRow>& rows);

}  // namespace fcw
