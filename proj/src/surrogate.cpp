#include "fcw/surrogate.hpp"

#include <algorithm>
#include <cmath>

namespace fcw {

double u_curve(double d) {
  if (d < 0) throw Error("u_curve: distance must be non-negative");
  const double b = 0.48 * kGravity;
  return b - std::sqrt(b * b + 0.8 * kGravity * d);
}

TangentPoint pick_d0(double d_max) {
  if (!(d_max > 0) || !std::isfinite(d_max)) throw Error("pick_d0: d_max must be positive and finite");
  const double slope = u_curve(d_max) / d_max;
  const double b = 0.48 * kGravity;
  const double r = 0.4 * kGravity / std::abs(slope);
  const double d0 = (r * r - b * b) / (0.8 * kGravity);
  return {d0, b + 0.4 * kGravity / slope, slope};
}

std::vector<LinearConstraint> surrogate_for(Light light, const SurrogateParams& p) {
  if (!(p.epsilon > 0)) throw Error("surrogate_for: epsilon must be positive");
  const double eps = p.epsilon;
  switch (light) {
    case Light::green:
      return {{0.0, -1.0, -eps, {}}};
    case Light::red: {
      const TangentPoint tp = pick_d0(p.d_max);
      return {{0.0, 1.0, -eps, {}}, {-tp.slope, 1.0, -tp.slope * tp.d0 + tp.u_d0 - eps, {}}};
    }
    case Light::yellow: {
      const TangentPoint tp = pick_d0(p.d_max);
      return {{0.0, 1.0, -eps, {}}, {tp.slope, -1.0, -eps, {}}};
    }
  }
  return {};
}

std::vector<LinearConstraint> slacken(std::vector<LinearConstraint> cs) {
  for (auto& c : cs) c.slack = c.a_d == 0.0 ? SlackFamily::xi : SlackFamily::zeta;
  return cs;
}

std::pair<double, double> required_slacks(Light light, const SurrogateParams& p, double d, double v) {
  double xi = 0, zeta = 0;
  for (const auto& c : slacken(surrogate_for(light, p))) {
    const double s = std::max(0.0, c.violation(d, v));
    if (*c.slack == SlackFamily::xi) xi = std::max(xi, s);
    else zeta = std::max(zeta, s);
  }
  return {xi, zeta};
}

}  // namespace fcw
