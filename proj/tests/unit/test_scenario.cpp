#include "fcw/alert.hpp"
#include "fcw/io.hpp"
#include "fcw/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace fcw;

namespace {

int first_red(const std::vector<MeasurementFrame>& frames) {
  const auto fs = track(constant_acceleration_model(0.05), 100 * Mat6::Identity(), frames);
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (classify(fs[i].xhat) == Light::red) return static_cast<int>(i) + 1;
  return -1;
}

}  // namespace

TEST(Synthesize, NoiselessSensorsEqualGroundTruth) {
  const Trace tr = synthesize_trace(mio_minus_10().noiseless());
  ASSERT_EQ(tr.frames.size(), 295u);
  for (std::size_t t = 0; t < tr.frames.size(); ++t) {
    const Vec8& y = tr.frames[t].y;
    const GroundTruth& g = tr.truth[t];
    EXPECT_EQ(y(meas::vd1), g.d1);
    EXPECT_EQ(y(meas::rd1), g.d1);
    EXPECT_EQ(y(meas::vv1), g.v1);
    EXPECT_EQ(y(meas::rv1), g.v1);
    EXPECT_EQ(y(meas::vd2), g.d2);
    EXPECT_EQ(y(meas::rv2), g.v2);
  }
}

TEST(Synthesize, ClosingGapIsLinear) {
  const Trace tr = synthesize_trace(mio_minus_10().noiseless());
  for (std::size_t t = 0; t < tr.truth.size(); ++t) {
    EXPECT_NEAR(tr.truth[t].d1, 73.75 - 0.5 * static_cast<double>(t), 1e-9);
    EXPECT_NEAR(tr.truth[t].v1, -10.0, 1e-12);
  }
}

TEST(Synthesize, FirstRedCalibration) {
  EXPECT_EQ(first_red(synthesize_trace(mio_minus_10().noiseless()).frames), 98);
  const Trace noisy = synthesize_trace(mio_minus_10());
  EXPECT_NEAR(first_red(preprocess(noisy.frames)), 98, 6);
}

TEST(Synthesize, DefaultNoiseHasDropoutsAndOutliers) {
  const Trace tr = synthesize_trace(mio_minus_10());
  int missing = 0;
  for (const auto& f : tr.frames) {
    missing += !f.finite();
    EXPECT_TRUE(f.radar().allFinite());
  }
  EXPECT_GT(missing, 0);
}

TEST(Synthesize, SameSeedSameTrace) {
  ScenarioSpec s = mio_plus_1();
  s.seed = 7;
  const Trace a = synthesize_trace(s), b = synthesize_trace(s);
  std::ostringstream sa, sb;
  write_trace_csv(sa, a);
  write_trace_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  s.seed = 8;
  std::ostringstream sc;
  write_trace_csv(sc, synthesize_trace(s));
  EXPECT_NE(sa.str(), sc.str());
}

TEST(Synthesize, RejectsInvalidSpecs) {
  ScenarioSpec s;
  s.T = 1;
  EXPECT_THROW(synthesize_trace(s), Error);
  s = ScenarioSpec{};
  s.trailing_gap = 5.0;
  EXPECT_THROW(synthesize_trace(s), Error);
  EXPECT_THROW(scenario_preset("mio-3"), Error);
}

TEST(RadarDetection, ZeroAngles) {
  const Vec4 r = radar_to_detection({0.0, 0.0, 10.0, -3.0});
  EXPECT_LE((r - Vec4(10, -3, 0, 0)).norm(), 1e-12);
}

TEST(RadarDetection, PureLateral) {
  const Vec4 r = radar_to_detection({0.0, std::numbers::pi / 2, 10.0, 2.0});
  EXPECT_LE((r - Vec4(0, 0, 10, 2)).norm(), 1e-12);
}

TEST(RadarDetection, ObliqueReturn) {
  const double a = std::numbers::pi / 6;
  const Vec4 r = radar_to_detection({a, a, 8.0, 2.0});
  EXPECT_LE((r - Vec4(6.0, 1.5, 3.4641, 0.8660)).lpNorm<Eigen::Infinity>(), 1e-4);
}

TEST(RadarDetection, PlanarRangeIdentity) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ang(-3.2, 3.2), rng_d(0.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const RadarReturn r{ang(rng), ang(rng), rng_d(rng), rng_d(rng) - 50};
    const Vec4 x = radar_to_detection(r);
    EXPECT_NEAR(x(0) * x(0) + x(2) * x(2), std::pow(r.d * std::cos(r.al), 2), 1e-9);
  }
}

TEST(Preprocess, LinearImputation) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(preprocess_column({1.0, nan, 3.0}), (std::vector<double>{1.0, 2.0, 3.0}));
}

TEST(Preprocess, CleanColumnUnchanged) {
  std::vector<double> x;
  for (int i = 0; i < 50; ++i) x.push_back(70.0 - 0.5 * i);
  const auto y = preprocess_column(x);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(y[i], x[i], 1e-12);
}

TEST(Preprocess, SpikeReplaced) {
  const auto y = preprocess_column({10, 10, 500, 10, 10});
  for (double v : y) EXPECT_NEAR(v, 10.0, 1e-12);
}

TEST(Preprocess, EdgeGapsFollowNearestSamples) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(preprocess_column({nan, 4, 4, 4, 9, 9, 9, nan}), (std::vector<double>{4, 4, 4, 4, 9, 9, 9, 9}));
  EXPECT_EQ(preprocess_column({nan, nan, 7.0}), (std::vector<double>{7.0, 7.0, 7.0}));
  const auto ramp = preprocess_column({nan, 2, 3, 4, 5, 6, nan});
  EXPECT_NEAR(ramp.front(), 1.0, 1e-12);
  EXPECT_NEAR(ramp.back(), 7.0, 1e-12);
  EXPECT_THROW(preprocess_column({nan, nan}), Error);
}

TEST(Preprocess, Idempotent) {
  ScenarioSpec s = mio_minus_10();
  s.outlier_rate = 0.05;
  s.dropout = 0.1;
  const auto once = preprocess(synthesize_trace(s).frames);
  const auto twice = preprocess(once);
  for (std::size_t t = 0; t < once.size(); ++t) {
    EXPECT_TRUE(once[t].finite());
    EXPECT_LE((once[t].y - twice[t].y).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(Preprocess, TracksGroundTruth) {
  const Trace tr = synthesize_trace(mio_minus_10());
  const auto out = preprocess(tr.frames);
  double err = 0;
  for (std::size_t t = 0; t < out.size(); ++t) err += std::abs(out[t].y(meas::vd1) - tr.truth[t].d1);
  EXPECT_LT(err / static_cast<double>(out.size()), 0.5);
}

TEST(Preprocess, LeavesRadarAlone) {
  const Trace tr = synthesize_trace(mio_plus_1());
  const auto out = preprocess(tr.frames);
  for (std::size_t t = 0; t < out.size(); ++t) EXPECT_EQ(out[t].radar(), tr.frames[t].radar());
  auto bad = tr.frames;
  bad[3].y(meas::rd1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(preprocess(bad), Error);
}

TEST(TraceCsv, RoundTripKeepsMissingValues) {
  const Trace tr = synthesize_trace(mio_minus_10());
  std::stringstream ss;
  write_trace_csv(ss, tr);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "t,v_d1,v_v1,v_d2,v_v2,r_d1,r_v1,r_d2,r_v2,gt_d1,gt_v1");
  EXPECT_NE(text.find("NaN"), std::string::npos);
  const Trace back = read_trace_csv(ss);
  ASSERT_EQ(back.frames.size(), tr.frames.size());
  for (std::size_t t = 0; t < tr.frames.size(); ++t) {
    for (int k = 0; k < 8; ++k) {
      const double a = tr.frames[t].y(k), b = back.frames[t].y(k);
      if (std::isnan(a)) EXPECT_TRUE(std::isnan(b));
      else EXPECT_EQ(a, b);
    }
    EXPECT_EQ(back.truth[t].d1, tr.truth[t].d1);
  }
}

TEST(TraceCsv, RejectsMalformedInput) {
  std::istringstream wrong_header("t,a,b\n1,2,3\n");
  EXPECT_THROW(read_trace_csv(wrong_header), Error);
  std::istringstream bad_cell("t,v_d1,v_v1,v_d2,v_v2,r_d1,r_v1,r_d2,r_v2,gt_d1,gt_v1\n1,x,0,0,0,0,0,0,0,0,0\n");
  EXPECT_THROW(read_trace_csv(bad_cell), Error);
  std::istringstream empty("");
  EXPECT_THROW(read_trace_csv(empty), Error);
}

TEST(Numbers, FormatRoundTrip) {
  for (double v : {0.1, -19.99683, 1e300, 12.755102040816327, 0.0}) EXPECT_EQ(parse_number(format_number(v)), v);
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_TRUE(std::isnan(parse_number("NaN")));
  EXPECT_THROW(parse_number("12abc"), Error);
}
