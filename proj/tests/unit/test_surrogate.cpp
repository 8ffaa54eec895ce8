#include "fcw/surrogate.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace fcw;

namespace {

bool all_satisfied(const std::vector<LinearConstraint>& cs, double d, double v) {
  for (const auto& c : cs)
    if (!c.satisfied(d, v)) return false;
  return true;
}

}  // namespace

TEST(UCurve, ClosedFormValues) {
  EXPECT_EQ(u_curve(0.0), 0.0);
  EXPECT_NEAR(u_curve(75.0), -19.9968, 1e-4);
  EXPECT_NEAR(u_curve(24.75), -9.999, 1e-3);
  EXPECT_THROW(u_curve(-1.0), Error);
}

TEST(UCurve, InvertsSafeDistance) {
  for (double d = 0.5; d <= 75; d += 0.5) EXPECT_NEAR(safe_distance(u_curve(d)), d, 1e-9);
}

TEST(TangentPoint, ClosedFormAtSeventyFive) {
  const TangentPoint tp = pick_d0(75.0);
  EXPECT_NEAR(tp.slope, -0.26662, 1e-5);
  EXPECT_NEAR(tp.d0, 24.75, 1e-2);
  EXPECT_NEAR(tp.u_d0, -9.998, 1e-3);
  EXPECT_NEAR(u_curve(tp.d0), tp.u_d0, 1e-6);
  const double h = 1e-3;
  EXPECT_NEAR((u_curve(tp.d0 + h) - u_curve(tp.d0 - h)) / (2 * h), tp.slope, 1e-4);
  EXPECT_THROW(pick_d0(0.0), Error);
}

TEST(TangentPoint, TangentLineStaysBelowCurve) {
  const TangentPoint tp = pick_d0(75.0);
  auto line = [&](double d) { return tp.u_d0 + tp.slope * (d - tp.d0); };
  EXPECT_NEAR(line(tp.d0), u_curve(tp.d0), 1e-9);
  for (double d = 0; d <= 75; d += 0.01) EXPECT_LE(line(d), u_curve(d) + 1e-12);
}

TEST(TangentPoint, ChordStaysAboveCurve) {
  const double slope = pick_d0(75.0).slope;
  for (double d = 0; d <= 75; d += 0.01) EXPECT_GE(slope * d, u_curve(d) - 1e-12);
}

TEST(Surrogate, GreenNeedsOpeningGap) {
  const SurrogateParams p;
  EXPECT_TRUE(all_satisfied(surrogate_for(Light::green, p), 50, 0.01));
  EXPECT_FALSE(all_satisfied(surrogate_for(Light::green, p), 50, 0.0));
}

TEST(Surrogate, RedBelowTangent) {
  const SurrogateParams p;
  EXPECT_TRUE(all_satisfied(surrogate_for(Light::red, p), 24.75, -10.1));
  EXPECT_FALSE(all_satisfied(surrogate_for(Light::red, p), 24.75, -9.8));
}

TEST(Surrogate, YellowChordBoundary) {
  const SurrogateParams p;
  const auto cs = surrogate_for(Light::yellow, p);
  ASSERT_EQ(cs.size(), 2u);
  const double slope = pick_d0(75.0).slope;
  // The chord constraint is active at v = slope·75 + ε.
  EXPECT_NEAR(cs[1].violation(75.0, slope * 75.0 + p.epsilon), 0.0, 1e-12);
  EXPECT_NEAR(slope * 75.0 + p.epsilon, -19.9958, 1e-4);
}

TEST(Surrogate, RejectsNonPositiveMargin) {
  EXPECT_THROW(surrogate_for(Light::green, {0.0, 75.0}), Error);
}

TEST(Surrogate, TightnessOnSampledStates) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> ud(0.0, 75.0), uv(-30.0, 30.0);
  const SurrogateParams p;
  const Light lights[] = {Light::green, Light::yellow, Light::red};
  std::vector<std::vector<LinearConstraint>> cs;
  for (Light l : lights) cs.push_back(surrogate_for(l, p));
  int hits[3] = {0, 0, 0};
  for (int i = 0; i < 100000; ++i) {
    const double d = ud(rng), v = uv(rng);
    for (int k = 0; k < 3; ++k) {
      if (!all_satisfied(cs[static_cast<std::size_t>(k)], d, v)) continue;
      ++hits[k];
      ASSERT_EQ(classify(d, v), lights[k]) << "d=" << d << " v=" << v;
    }
  }
  for (int h : hits) EXPECT_GT(h, 1000);
}

TEST(Slacks, FamiliesFollowCoupling) {
  for (Light l : {Light::green, Light::yellow, Light::red})
    for (const auto& c : slacken(surrogate_for(l, {}))) {
      ASSERT_TRUE(c.slack.has_value());
      EXPECT_EQ(*c.slack, c.a_d == 0.0 ? SlackFamily::xi : SlackFamily::zeta);
    }
}

TEST(Slacks, ZeroSlackRecoversConstraints) {
  const auto plain = surrogate_for(Light::red, {});
  const auto slack = slacken(plain);
  for (std::size_t i = 0; i < plain.size(); ++i) {
    EXPECT_EQ(plain[i].satisfied(30, -12), slack[i].satisfied(30, -12, 0.0));
    EXPECT_EQ(plain[i].satisfied(10, -2), slack[i].satisfied(10, -2, 0.0));
  }
}

TEST(Slacks, RedAtStandstillGap) {
  const SurrogateParams p;
  const TangentPoint tp = pick_d0(p.d_max);
  const auto [xi, zeta] = required_slacks(Light::red, p, 30.0, 0.0);
  EXPECT_NEAR(xi, p.epsilon, 1e-15);
  EXPECT_NEAR(zeta, 0.0 - (tp.slope * (30.0 - tp.d0) + tp.u_d0 - p.epsilon), 1e-12);
}

TEST(Slacks, LargeSlackSatisfiesEverything) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ud(-50.0, 150.0), uv(-60.0, 60.0);
  for (int i = 0; i < 1000; ++i) {
    const double d = ud(rng), v = uv(rng);
    for (Light l : {Light::green, Light::yellow, Light::red}) {
      const auto [xi, zeta] = required_slacks(l, {}, d, v);
      for (const auto& c : slacken(surrogate_for(l, {})))
        EXPECT_TRUE(c.satisfied(d, v, *c.slack == SlackFamily::xi ? xi : zeta));
    }
  }
}

TEST(Slacks, ZeroWhenSurrogateHolds) {
  const auto [xi, zeta] = required_slacks(Light::red, {}, 10.0, -20.0);
  EXPECT_EQ(xi, 0.0);
  EXPECT_EQ(zeta, 0.0);
}
