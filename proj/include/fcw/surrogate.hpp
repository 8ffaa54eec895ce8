#pragma once

#include "fcw/alert.hpp"

#include <optional>
#include <vector>

namespace fcw {

/// U(d) = 0.48g - sqrt((0.48g)² + 0.8 g d): the velocity at which d equals the safe distance.
double u_curve(double d);

enum class SlackFamily { xi, zeta };

/// a_d·d + a_v·v ≤ c, optionally relaxed by an additive slack: a_d·d + a_v·v - s ≤ c.
struct LinearConstraint {
  double a_d = 0;
  double a_v = 0;
  double c = 0;
  std::optional<SlackFamily> slack;

  /// Signed violation a_d·d + a_v·v - c (positive when the zero-slack constraint is violated).
  double violation(double d, double v) const { return a_d * d + a_v * v - c; }
  bool satisfied(double d, double v, double s = 0.0) const { return violation(d, v) <= s; }
};

struct SurrogateParams {
  double epsilon = 1e-3;
  double d_max = 75.0;
};

struct TangentPoint {
  double d0;
  double u_d0;
  double slope;
};

/// Tangent of U parallel to the chord from (0, U(0)) to (d_max, U(d_max)).
TangentPoint pick_d0(double d_max);

std::vector<LinearConstraint> surrogate_for(Light light, const SurrogateParams& p);

/// Attaches slack families: ξ to the velocity-sign constraint, ζ to the distance-coupled one.
std::vector<LinearConstraint> slacken(std::vector<LinearConstraint> cs);

/// Smallest slacks (ξ, ζ) that satisfy the slackened surrogate of `light` at (d, v).
std::pair<double, double> required_slacks(Light light, const SurrogateParams& p, double d, double v);

}  // namespace fcw
