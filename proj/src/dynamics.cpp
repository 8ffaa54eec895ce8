#include "fcw/dynamics.hpp"

#include "fcw/alert.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fcw {

namespace {

// Gaps within this distance of zero are reported as exactly zero (grazing contact).
constexpr double kContactTolerance = 1e-9;
constexpr int kMaxSteps = 200000;

// Time until the vehicle stops under its own acceleration, or +inf.
double time_to_stop(const VehicleTrack& v) {
  if (v.accel >= 0) return std::numeric_limits<double>::infinity();
  return v.speed / -v.accel;
}

VehicleTrack advance(const VehicleTrack& v, double tau) {
  VehicleTrack out = v;
  out.position += v.speed * tau + 0.5 * v.accel * tau * tau;
  out.speed = std::max(0.0, v.speed + v.accel * tau);
  return out;
}

// Minimum over τ ∈ [0, len] of g0 + vr τ + ar τ² / 2.
double min_quadratic(double g0, double vr, double ar, double len) {
  double m = std::min(g0, g0 + vr * len + 0.5 * ar * len * len);
  if (ar > 0) {
    const double tau = -vr / ar;
    if (tau > 0 && tau < len) m = std::min(m, g0 + vr * tau + 0.5 * ar * tau * tau);
  }
  return m;
}

double snap(double gap) { return std::abs(gap) <= kContactTolerance ? 0.0 : gap; }

}  // namespace

double braking_deceleration() { return 0.4 * kGravity; }

double stopping_distance(double speed) { return speed * speed / (2.0 * braking_deceleration()); }

VehicleTrack step_kinematics(const VehicleTrack& v, double dt) {
  if (!(dt > 0)) throw Error("step_kinematics: dt must be positive");
  VehicleTrack out;
  const double ts = time_to_stop(v);
  if (ts < dt) {
    out = advance(v, ts);
    out.speed = 0.0;
  } else {
    out = advance(v, dt);
  }
  out.accel = v.accel;
  return out;
}

CrashReport forward_crash_oracle(const VehicleTrack& ego_in, const VehicleTrack& mio_in,
                                 std::optional<int> brake_onset, double dt) {
  if (!(dt > 0)) throw Error("forward_crash_oracle: dt must be positive");
  if (mio_in.position < ego_in.position)
    throw Error("forward_crash_oracle: ego must start behind the lead vehicle");
  VehicleTrack ego = ego_in;
  VehicleTrack mio = mio_in;
  ego.accel = 0.0;
  CrashReport rep;
  rep.min_gap = mio.position - ego.position;

  for (int step = 1; step < kMaxSteps; ++step) {
    const bool braking = brake_onset && step >= *brake_onset;
    if (braking) ego.accel = -braking_deceleration();
    // Integrate one step piecewise, splitting at stop events.
    double remaining = dt;
    while (remaining > 0) {
      VehicleTrack e = ego, l = mio;
      if (e.speed <= 0 && e.accel < 0) e.accel = 0;
      if (l.speed <= 0 && l.accel < 0) l.accel = 0;
      const double te = time_to_stop(e), tl = time_to_stop(l);
      const double seg = std::min({remaining, te, tl});
      const double m = min_quadratic(l.position - e.position, l.speed - e.speed, l.accel - e.accel, seg);
      rep.min_gap = std::min(rep.min_gap, m);
      if (snap(m) < 0 && !rep.step) rep.step = step + 1;
      e = advance(e, seg);
      l = advance(l, seg);
      if (seg == te) e.speed = 0;
      if (seg == tl) l.speed = 0;
      ego.position = e.position;
      ego.speed = e.speed;
      mio.position = l.position;
      mio.speed = l.speed;
      remaining -= seg;
    }
    const bool not_closing = ego.speed <= mio.speed && (ego.speed == 0 || ego.accel <= mio.accel);
    if ((braking || !brake_onset) && not_closing && mio.accel >= 0) break;
    if (!brake_onset && rep.step) break;
  }
  rep.min_gap = snap(rep.min_gap);
  rep.collided = rep.min_gap < 0;
  if (!rep.collided) rep.step.reset();
  rep.penetration = std::max(0.0, -rep.min_gap);
  return rep;
}

CrashReport rear_crash_oracle(double trailing_gap, double brake_duration, double ego_speed, double dt) {
  if (brake_duration < 0) throw Error("rear_crash_oracle: brake duration must be non-negative");
  const double a = braking_deceleration();
  const double ts = ego_speed / a;
  auto closure = [&](double t) {
    if (t <= ts) return 0.5 * a * t * t;
    return ego_speed * t - ego_speed * ego_speed / (2.0 * a);
  };
  CrashReport rep;
  const double c = closure(brake_duration);
  rep.min_gap = snap(trailing_gap - c);
  rep.collided = rep.min_gap < 0;
  rep.penetration = std::max(0.0, -rep.min_gap);
  if (rep.collided) {
    double t_contact = std::sqrt(2.0 * trailing_gap / a);
    if (t_contact > ts) t_contact = (trailing_gap + ego_speed * ego_speed / (2.0 * a)) / ego_speed;
    rep.step = static_cast<int>(std::ceil(t_contact / dt));
  }
  return rep;
}

}  // namespace fcw
