#pragma once

#include <optional>

namespace fcw {

/// Deceleration of a braking vehicle, 0.4 g.
double braking_deceleration();

struct VehicleTrack {
  double position = 0;  ///< meters along the road
  double speed = 0;  ///< m/s, never negative
  double accel = 0;  ///< m/s²
};

struct CrashReport {
  bool collided = false;
  std::optional<int> step;  ///< first step with negative gap, if any
  double min_gap = 0;
  double penetration = 0;
};

/// Constant-acceleration update. A vehicle that would reverse stops exactly where its speed reaches 0.
VehicleTrack step_kinematics(const VehicleTrack& v, double dt);

/// Distance covered from `speed` to rest at the braking deceleration.
double stopping_distance(double speed);

/// Ego holds speed until time (brake_onset-1)·dt, then brakes at 0.4 g. The MIO keeps its acceleration.
/// A missing onset means the ego never brakes. Steps are 1-based with step 1 at time 0.
CrashReport forward_crash_oracle(const VehicleTrack& ego, const VehicleTrack& mio,
                                 std::optional<int> brake_onset, double dt);

/// A distracted trailing vehicle holds the ego's initial speed while the ego brakes for
/// `brake_duration` seconds. `step` is counted in dt steps from brake onset.
CrashReport rear_crash_oracle(double trailing_gap, double brake_duration, double ego_speed = 27.0,
                              double dt = 0.05);

}  // namespace fcw
