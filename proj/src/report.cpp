#include "fcw/report.hpp"

#include "fcw/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <ostream>

namespace fcw {

void write_attack_summary(std::ostream& os, const Experiment& e, const AttackResult& r, const Outcome& o) {
  nlohmann::ordered_json j;
  j["scenario"] = e.scenario.name;
  j["seed"] = e.scenario.seed;
  j["steps"] = static_cast<int>(r.attacked_states.size());
  j["strategy"] = r.strategy;
  j["target"] = {r.target.first, r.target.last};
  j["stealthy"] = {r.stealthy.first, r.stealthy.last};
  j["stealthy_length"] = r.stealthy.size();
  j["target_light"] = std::string(1, light_char(e.target_light));
  j["delta"] = format_number(e.settings.delta);
  j["lambda"] = e.settings.lambda;
  j["metrics"] = {{"v_target", r.metrics.v_target}, {"v_stealthy", r.metrics.v_stealthy},
                  {"j1", r.metrics.j1},             {"j2", r.metrics.j2},
                  {"j3", r.metrics.j3},             {"j", r.metrics.j}};
  j["lights_before"] = light_string(r.lights_before);
  j["lights_after"] = light_string(r.lights_after);
  nlohmann::ordered_json out;
  out["hazard"] = o.hazard;
  out["brake_onset"] = o.brake_onset ? nlohmann::ordered_json(*o.brake_onset) : nullptr;
  out["brake_release"] = o.brake_release ? nlohmann::ordered_json(*o.brake_release) : nullptr;
  out["brake_duration"] = o.brake_duration;
  out["collided"] = o.crash.collided;
  out["collision_step"] = o.crash.step ? nlohmann::ordered_json(*o.crash.step) : nullptr;
  out["min_gap"] = o.crash.min_gap;
  j["outcome"] = out;
  if (!r.qp_log.empty()) {
    int iters = 0, largest = 0;
    double kkt = 0;
    for (const QpLogEntry& q : r.qp_log) {
      iters += q.iterations;
      largest = std::max(largest, q.variables);
      kkt = std::max(kkt, q.kkt_residual);
    }
    j["solver"] = {{"solves", r.qp_log.size()},
                   {"iterations", iters},
                   {"largest_problem", largest},
                   {"max_kkt_residual", kkt}};
  }
  os << j.dump(2) << '\n';
}

void write_attack_steps(std::ostream& os, const AttackResult& r) {
  const bool manipulated = r.strategy != "none";
  os << "t,window,light_before,light_after,y_vd1,y_vv1,y_vd2,y_vv2,y_rd1,y_rv1,y_rd2,y_rv2";
  if (manipulated) os << ",delta_vd1,delta_vv1,delta_vd2,delta_vv2,xi,zeta";
  os << '\n';
  for (std::size_t i = 0; i < r.attacked_states.size(); ++i) {
    const int t = static_cast<int>(i) + 1;
    const char* window = r.target.contains(t) ? "target" : r.stealthy.contains(t) ? "stealthy" : "";
    os << t << ',' << window << ',' << light_char(r.lights_before[i]) << ',' << light_char(r.lights_after[i]);
    for (int k = 0; k < 8; ++k) os << ',' << format_number(r.true_y[i](k));
    if (manipulated) {
      for (int k = 0; k < 4; ++k) os << ',' << format_number(r.delta[i](k));
      os << ',' << format_number(r.xi[i]) << ',' << format_number(r.zeta[i]);
    }
    os << '\n';
  }
}

void write_plot_data(std::ostream& os, const AttackResult& r) {
  os << "t,meas_d_before,meas_v_before,meas_d_after,meas_v_after,est_d_before,est_v_before,est_a_before,"
        "est_d_after,est_v_after,est_a_after,light_before,light_after\n";
  for (std::size_t i = 0; i < r.attacked_states.size(); ++i) {
    const Vec6& c = r.clean_states[i];
    const Vec6& a = r.attacked_states[i];
    os << i + 1 << ',' << format_number(r.true_y[i](meas::vd1)) << ',' << format_number(r.true_y[i](meas::vv1)) << ','
       << format_number(r.attacked_y[i](meas::vd1)) << ',' << format_number(r.attacked_y[i](meas::vv1)) << ','
       << format_number(c(state::d1)) << ',' << format_number(c(state::v1)) << ',' << format_number(c(state::a1))
       << ',' << format_number(a(state::d1)) << ',' << format_number(a(state::v1)) << ','
       << format_number(a(state::a1)) << ',' << light_char(r.lights_before[i]) << ',' << light_char(r.lights_after[i])
       << '\n';
  }
}

}  // namespace fcw
