#include "fcw/alert.hpp"

#include <algorithm>

namespace fcw {

char light_char(Light l) {
  switch (l) {
    case Light::green: return 'G';
    case Light::yellow: return 'Y';
    case Light::red: return 'R';
  }
  return '?';
}

Light parse_light(char c) {
  switch (c) {
    case 'G': case 'g': return Light::green;
    case 'Y': case 'y': return Light::yellow;
    case 'R': case 'r': return Light::red;
    default: throw Error(std::string("unknown warning light '") + c + "'");
  }
}

std::string light_string(const std::vector<Light>& lights) {
  std::string s;
  s.reserve(lights.size());
  for (Light l : lights) s.push_back(light_char(l));
  return s;
}

double safe_distance(double v1) {
  return -1.2 * v1 + v1 * v1 / (0.8 * kGravity);
}

Light classify(double d1, double v1) {
  if (v1 >= 0) return Light::green;
  return d1 > safe_distance(v1) ? Light::yellow : Light::red;
}

Light classify(const TrackState& xhat) { return classify(xhat.d1, xhat.v1); }

Light classify(const Vec6& xhat) { return classify(xhat(state::d1), xhat(state::v1)); }

DriverState driver_step(const DriverState& ds, Light light, std::optional<Light> prev_light) {
  if (ds.h_star < 1) throw Error("driver_step: h_star must be at least 1");
  DriverState out = ds;
  if (prev_light && *prev_light != light) {
    out.s = 0;
  } else if (light == Light::red) {
    out.s = std::min(out.s + 1, ds.h_star);
  } else {
    out.s = std::max(out.s - 1, -ds.h_star);
  }
  if (out.s >= ds.h_star) out.braking = true;
  else if (out.s <= -ds.h_star) out.braking = false;
  return out;
}

std::vector<bool> simulate_driver(const std::vector<Light>& lights, int h_star) {
  if (lights.empty()) throw Error("simulate_driver: empty light sequence");
  DriverState ds;
  ds.h_star = h_star;
  std::vector<bool> braking;
  braking.reserve(lights.size());
  for (std::size_t t = 0; t < lights.size(); ++t) {
    std::optional<Light> prev;
    if (t > 0) prev = lights[t - 1];
    ds = driver_step(ds, lights[t], prev);
    braking.push_back(ds.braking);
  }
  return braking;
}

}  // namespace fcw
