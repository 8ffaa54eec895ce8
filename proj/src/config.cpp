#include "fcw/config.hpp"

#include "fcw/io.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace fcw {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& section, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError("config: section '" + section + "' must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("config: unknown key '" + key + "' in section '" + section + "'");
}

double number(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_number(v.get<std::string>());
    } catch (const Error&) {
    }
  }
  throw ConfigError("config: '" + key + "' must be a number");
}

template <class F>
void with(const json& j, const char* key, F f) {
  if (j.contains(key)) f(j.at(key));
}

std::pair<double, double> range(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) throw ConfigError("config: '" + key + "' must be a [low, high] pair");
  return {number(v[0], key), number(v[1], key)};
}

void apply_scenario(RunConfig& cfg, const json& j) {
  check_keys(j, "scenario",
             {"preset", "trace", "seed", "noise", "T", "dt", "ego_speed", "mio_speed", "initial_gap", "trailing_speed",
              "trailing_gap", "lateral_offset", "vision_d_std", "vision_v_std", "radar_d_std", "radar_v_std", "dropout",
              "outlier_rate", "outlier_magnitude"});
  ScenarioSpec& s = cfg.scenario;
  if (j.contains("preset")) {
    const std::uint64_t seed = s.seed;
    try {
      s = scenario_preset(j.at("preset").get<std::string>());
    } catch (const Error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    s.seed = seed;
  }
  with(j, "trace", [&](const json& v) { cfg.trace_path = v.get<std::string>(); });
  with(j, "seed", [&](const json& v) { s.seed = v.get<std::uint64_t>(); });
  with(j, "noise", [&](const json& v) {
    if (!v.get<bool>()) s = s.noiseless();
  });
  with(j, "T", [&](const json& v) { s.T = v.get<int>(); });
  const std::pair<const char*, double*> fields[] = {
      {"dt", &s.dt},
      {"ego_speed", &s.ego_speed},
      {"mio_speed", &s.mio_speed},
      {"initial_gap", &s.initial_gap},
      {"lateral_offset", &s.lateral_offset},
      {"vision_d_std", &s.vision_d_std},
      {"vision_v_std", &s.vision_v_std},
      {"radar_d_std", &s.radar_d_std},
      {"radar_v_std", &s.radar_v_std},
      {"dropout", &s.dropout},
      {"outlier_rate", &s.outlier_rate},
      {"outlier_magnitude", &s.outlier_magnitude},
  };
  for (const auto& [key, dst] : fields) with(j, key, [&](const json& v) { *dst = number(v, key); });
  with(j, "trailing_speed", [&](const json& v) { s.trailing_speed = v.is_null() ? std::nullopt : std::optional(number(v, "trailing_speed")); });
  with(j, "trailing_gap", [&](const json& v) { s.trailing_gap = v.is_null() ? std::nullopt : std::optional(number(v, "trailing_gap")); });
}

void apply_kf(RunConfig& cfg, const json& j) {
  check_keys(j, "kf", {"accel_intensity", "vision_variance", "radar_variance", "sigma0"});
  with(j, "accel_intensity", [&](const json& v) { cfg.kf.accel_intensity = number(v, "accel_intensity"); });
  with(j, "vision_variance", [&](const json& v) { cfg.kf.vision_variance = number(v, "vision_variance"); });
  with(j, "radar_variance", [&](const json& v) { cfg.kf.radar_variance = number(v, "radar_variance"); });
  with(j, "sigma0", [&](const json& v) { cfg.kf.sigma0 = number(v, "sigma0"); });
}

void apply_attack(RunConfig& cfg, const json& j) {
  check_keys(j, "attack",
             {"strategy", "stealthy_fraction", "delta", "lambda", "epsilon", "d_bounds", "v_bounds", "target_light",
              "target_start", "target_length", "h_star", "qp_tol"});
  AttackSettings& a = cfg.settings;
  with(j, "strategy", [&](const json& v) { cfg.strategy = parse_strategy(v.get<std::string>()); });
  with(j, "stealthy_fraction", [&](const json& v) { cfg.stealthy_fraction = number(v, "stealthy_fraction"); });
  with(j, "delta", [&](const json& v) { a.delta = number(v, "delta"); });
  with(j, "lambda", [&](const json& v) { a.lambda = number(v, "lambda"); });
  with(j, "epsilon", [&](const json& v) { a.epsilon = number(v, "epsilon"); });
  with(j, "qp_tol", [&](const json& v) { a.qp_tol = number(v, "qp_tol"); });
  with(j, "h_star", [&](const json& v) { a.h_star = v.get<int>(); });
  with(j, "d_bounds", [&](const json& v) { std::tie(a.d_min, a.d_max) = range(v, "d_bounds"); });
  with(j, "v_bounds", [&](const json& v) { std::tie(a.v_min, a.v_max) = range(v, "v_bounds"); });
  if (j.contains("target_light") || j.contains("target_start") || j.contains("target_length")) {
    AttackGoal g = cfg.resolved_goal();
    with(j, "target_light", [&](const json& v) {
      const std::string s = v.get<std::string>();
      if (s.size() != 1) throw ConfigError("config: 'target_light' must be one of G, Y, R");
      g.light = parse_light(s[0]);
    });
    with(j, "target_start", [&](const json& v) { g.start = v.is_null() ? std::nullopt : std::optional(v.get<int>()); });
    with(j, "target_length", [&](const json& v) { g.length = v.get<int>(); });
    cfg.goal = g;
  }
}

void apply_sweep(RunConfig& cfg, const json& j) {
  check_keys(j, "sweep", {"fractions", "deltas", "strategies"});
  auto list = [](const json& v, const std::string& key) {
    if (!v.is_array()) throw ConfigError("config: '" + key + "' must be a list");
    std::vector<double> out;
    for (const json& x : v) out.push_back(number(x, key));
    return out;
  };
  with(j, "fractions", [&](const json& v) { cfg.fractions = list(v, "fractions"); });
  with(j, "deltas", [&](const json& v) { cfg.deltas = list(v, "deltas"); });
  with(j, "strategies", [&](const json& v) {
    cfg.sweep_strategies.clear();
    for (const json& x : v) cfg.sweep_strategies.push_back(parse_strategy(x.get<std::string>()));
  });
}

}  // namespace

void apply_config_json(RunConfig& cfg, const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    check_keys(j, "top level", {"scenario", "kf", "attack", "sweep", "output_dir"});
    // Scenario first: the default target depends on it.
    with(j, "scenario", [&](const json& v) { apply_scenario(cfg, v); });
    with(j, "kf", [&](const json& v) { apply_kf(cfg, v); });
    with(j, "attack", [&](const json& v) { apply_attack(cfg, v); });
    with(j, "sweep", [&](const json& v) { apply_sweep(cfg, v); });
    with(j, "output_dir", [&](const json& v) { cfg.output_dir = v.get<std::string>(); });
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_json(cfg, ss.str());
}

double parse_delta(const std::string& s) {
  double d;
  try {
    d = parse_number(s);
  } catch (const Error&) {
    throw ConfigError("delta '" + s + "' is not a number or 'inf'");
  }
  if (!(d >= 0)) throw ConfigError("delta must be non-negative");
  return d;
}

}  // namespace fcw
