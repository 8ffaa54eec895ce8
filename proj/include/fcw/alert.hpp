#pragma once

#include "fcw/kalman.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fcw {

constexpr double kGravity = 9.8;

enum class Light { green, yellow, red };

char light_char(Light l);
Light parse_light(char c);
std::string light_string(const std::vector<Light>& lights);

/// d*(v) = -1.2 v + v² / (0.8 g).
double safe_distance(double v1);

Light classify(double d1, double v1);
Light classify(const TrackState& xhat);
Light classify(const Vec6& xhat);

struct DriverState {
  bool braking = false;
  int s = 0;
  int h_star = 24;
};

/// One update of the reaction automaton. `first` marks step 1, where no reset happens.
DriverState driver_step(const DriverState& ds, Light light, std::optional<Light> prev_light);

std::vector<bool> simulate_driver(const std::vector<Light>& lights, int h_star);

}  // namespace fcw
