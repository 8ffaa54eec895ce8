#include "fcw/harness.hpp"

#include "fcw/io.hpp"

#include <json.hpp>

#include <cmath>
#include <future>
#include <ostream>

namespace fcw {

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::mpc: return "mpc";
    case Strategy::greedy: return "greedy";
    case Strategy::none: return "none";
  }
  return "?";
}

Strategy parse_strategy(const std::string& s) {
  if (s == "mpc") return Strategy::mpc;
  if (s == "greedy") return Strategy::greedy;
  if (s == "none") return Strategy::none;
  throw Error("unknown strategy '" + s + "' (expected mpc, greedy or none)");
}

AttackGoal default_goal(const ScenarioSpec& s) {
  if (s.trailing_gap) return {Light::red, 100, 40};
  return {Light::green, std::nullopt, 10};
}

Experiment prepare_experiment(const ScenarioSpec& scenario, const KfNoise& noise, const AttackGoal& goal,
                              const AttackSettings& settings, std::optional<Trace> raw,
                              const PreprocessOptions& pre) {
  scenario.validate();
  if (goal.length < 1) throw Error("attack: target length must be positive");
  if (!(noise.sigma0 > 0)) throw Error("kf: sigma0 must be positive");
  Experiment e;
  e.scenario = scenario;
  e.noise = noise;
  e.settings = settings;
  e.raw = raw ? std::move(*raw) : synthesize_trace(scenario);
  e.scenario.T = static_cast<int>(e.raw.frames.size());
  e.model = constant_acceleration_model(scenario.dt, noise);
  e.sigma0 = noise.sigma0 * Mat6::Identity();
  e.frames = preprocess(e.raw.frames, pre);
  for (const FilterState& fs : track(e.model, e.sigma0, e.frames)) e.baseline_lights.push_back(classify(fs.xhat));

  int start = 0;
  if (goal.start) {
    start = *goal.start;
  } else {
    for (std::size_t i = 0; i < e.baseline_lights.size() && !start; ++i)
      if (e.baseline_lights[i] == Light::red) start = static_cast<int>(i) + 1;
    if (!start) throw Error("attack: the unattacked run never shows red; give the target start explicitly");
  }
  e.target = {start, start + goal.length - 1};
  e.target_light = goal.light;
  if (e.target.first < 2 || e.target.last > e.scenario.T)
    throw Error("attack: target window [" + std::to_string(e.target.first) + ", " + std::to_string(e.target.last) +
                "] does not fit in steps 2.." + std::to_string(e.scenario.T));
  return e;
}

Interval stealthy_window(const Interval& target, double fraction) {
  if (!(fraction >= 0 && fraction <= 1)) throw Error("attack: stealthy fraction must lie in [0, 1]");
  const int full = target.first - 2;
  const int n = static_cast<int>(std::lround(fraction * full));
  return {target.first - n, target.first - 1};
}

AttackConfig make_attack_config(const Experiment& e, double stealthy_fraction, std::optional<double> delta) {
  AttackConfig c;
  c.target = e.target;
  c.stealthy = stealthy_window(e.target, stealthy_fraction);
  c.target_lights.assign(static_cast<std::size_t>(e.target.size()), e.target_light);
  for (int t = c.stealthy.first; t <= c.stealthy.last; ++t)
    c.original_lights.push_back(e.baseline_lights[static_cast<std::size_t>(t - 1)]);
  const AttackSettings& s = e.settings;
  c.delta = delta.value_or(s.delta);
  c.lambda = s.lambda;
  c.epsilon = s.epsilon;
  c.d_min = s.d_min;
  c.d_max = s.d_max;
  c.v_min = s.v_min;
  c.v_max = s.v_max;
  c.qp_tol = s.qp_tol;
  c.validate();
  return c;
}

AttackResult run_attack(const Experiment& e, Strategy s, const AttackConfig& cfg) {
  switch (s) {
    case Strategy::mpc: return mpc_attack(cfg, e.model, e.sigma0, e.frames);
    case Strategy::greedy: return greedy_attack(cfg, e.model, e.sigma0, e.frames);
    case Strategy::none: return no_attack(cfg, e.model, e.sigma0, e.frames);
  }
  throw Error("unknown strategy");
}

Outcome end_to_end_outcome(const ScenarioSpec& s, const std::vector<Light>& lights, int h_star) {
  const std::vector<bool> braking = simulate_driver(lights, h_star);
  Outcome o;
  for (std::size_t i = 0; i < braking.size(); ++i) {
    const int t = static_cast<int>(i) + 1;
    if (!o.brake_onset && braking[i]) o.brake_onset = t;
    else if (o.brake_onset && !o.brake_release && !braking[i]) o.brake_release = t;
  }
  if (o.brake_onset) {
    const int end = o.brake_release.value_or(static_cast<int>(lights.size()) + 1);
    o.brake_duration = (end - *o.brake_onset) * s.dt;
  }
  if (s.trailing_gap) {
    o.hazard = "rear";
    if (o.brake_onset) {
      o.crash = rear_crash_oracle(*s.trailing_gap, o.brake_duration, s.ego_speed, s.dt);
    } else {
      o.crash.min_gap = *s.trailing_gap;
    }
  } else {
    o.hazard = "forward";
    o.crash = forward_crash_oracle({0.0, s.ego_speed, 0.0}, {s.initial_gap, s.mio_speed, 0.0}, o.brake_onset, s.dt);
  }
  return o;
}

namespace {

SweepRow run_point(const Experiment& e, std::string sweep, Strategy strategy, double fraction,
                   std::optional<double> delta) {
  SweepRow row;
  row.sweep = std::move(sweep);
  row.strategy = strategy;
  row.fraction = fraction;
  row.delta = delta.value_or(e.settings.delta);
  try {
    const AttackConfig cfg = make_attack_config(e, fraction, delta);
    row.stealthy = cfg.stealthy;
    const AttackResult r = run_attack(e, strategy, cfg);
    row.metrics = r.metrics;
    row.achieved_targets = cfg.target.size() - r.metrics.v_target;
    row.outcome = end_to_end_outcome(e.scenario, r.lights_after, e.settings.h_star);
  } catch (const std::exception& ex) {
    row.error = ex.what();
  }
  return row;
}

std::vector<SweepRow> gather(std::vector<std::future<SweepRow>>& jobs) {
  std::vector<SweepRow> rows;
  for (auto& j : jobs) rows.push_back(j.get());
  return rows;
}

}  // namespace

std::vector<SweepRow> planning_sweep(const Experiment& e, const std::vector<Strategy>& strategies,
                                     const std::vector<double>& fractions) {
  std::vector<std::future<SweepRow>> jobs;
  for (Strategy s : strategies)
    for (double f : fractions)
      jobs.push_back(std::async(std::launch::async, run_point, std::cref(e), "planning", s, f, std::nullopt));
  return gather(jobs);
}

std::vector<SweepRow> delta_sweep(const Experiment& e, const std::vector<double>& deltas, Strategy s,
                                  double fraction) {
  std::vector<std::future<SweepRow>> jobs;
  for (double d : deltas)
    jobs.push_back(std::async(std::launch::async, run_point, std::cref(e), "delta", s, fraction, d));
  return gather(jobs);
}

bool nonincreasing(const std::vector<double>& values, double rel_tol) {
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1] + rel_tol * (1 + std::abs(values[i - 1]))) return false;
  return true;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "sweep,strategy,fraction,stealthy_first,stealthy_last,stealthy_length,delta,v_target,v_stealthy,"
        "achieved_targets,j1,j2,j3,j,brake_onset,brake_duration,collided,min_gap,error\n";
  for (const SweepRow& r : rows) {
    os << r.sweep << ',' << to_string(r.strategy) << ',' << format_number(r.fraction) << ',' << r.stealthy.first
       << ',' << r.stealthy.last << ',' << r.stealthy.size() << ',' << format_number(r.delta) << ','
       << r.metrics.v_target << ',' << r.metrics.v_stealthy << ',' << r.achieved_targets << ','
       << format_number(r.metrics.j1) << ','
       << format_number(r.metrics.j2) << ',' << format_number(r.metrics.j3) << ',' << format_number(r.metrics.j)
       << ',' << (r.outcome.brake_onset ? std::to_string(*r.outcome.brake_onset) : "") << ','
       << format_number(r.outcome.brake_duration) << ',' << (r.outcome.crash.collided ? 1 : 0) << ','
       << format_number(r.outcome.crash.min_gap) << ',';
    // Errors are free text; keep them on one CSV cell.
    std::string msg = r.error;
    for (char& c : msg)
      if (c == ',' || c == '\n') c = ';';
    os << msg << '\n';
  }
}

void write_sweep_json(std::ostream& os, const Experiment& e, const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json j;
  j["scenario"] = e.scenario.name;
  j["steps"] = e.scenario.T;
  j["target"] = {e.target.first, e.target.last};
  j["target_light"] = std::string(1, light_char(e.target_light));
  j["lambda"] = e.settings.lambda;
  j["rows"] = nlohmann::ordered_json::array();
  for (const SweepRow& r : rows) {
    nlohmann::ordered_json row;
    row["sweep"] = r.sweep;
    row["strategy"] = to_string(r.strategy);
    row["fraction"] = r.fraction;
    row["stealthy"] = {r.stealthy.first, r.stealthy.last};
    row["delta"] = format_number(r.delta);
    row["v_target"] = r.metrics.v_target;
    row["v_stealthy"] = r.metrics.v_stealthy;
    row["achieved_targets"] = r.achieved_targets;
    row["j1"] = r.metrics.j1;
    row["j2"] = r.metrics.j2;
    row["j3"] = r.metrics.j3;
    row["j"] = r.metrics.j;
    row["hazard"] = r.outcome.hazard;
    row["brake_onset"] = r.outcome.brake_onset ? nlohmann::ordered_json(*r.outcome.brake_onset) : nullptr;
    row["brake_duration"] = r.outcome.brake_duration;
    row["collided"] = r.outcome.crash.collided;
    row["min_gap"] = r.outcome.crash.min_gap;
    row["error"] = r.error;
    j["rows"].push_back(row);
  }
  os << j.dump(2) << '\n';
}

}  // namespace fcw
