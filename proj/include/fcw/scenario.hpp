#pragma once

#include "fcw/dynamics.hpp"
#include "fcw/kalman.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fcw {

struct ScenarioSpec {
  std::string name = "mio-10";
  double ego_speed = 27.0;
  double mio_speed = 17.0;
  std::optional<double> trailing_speed;  ///< set for scenarios with a following vehicle
  double initial_gap = 73.75;
  std::optional<double> trailing_gap;
  double lateral_offset = 0.0;
  int T = 295;
  double dt = 0.05;
  double vision_d_std = 0.5;
  double vision_v_std = 0.5;
  double radar_d_std = 0.2;
  double radar_v_std = 0.2;
  double dropout = 0.02;
  double outlier_rate = 0.01;
  double outlier_magnitude = 10.0;  ///< in multiples of the vision std
  std::uint64_t seed = 1;

  void validate() const;
  /// Same scenario with every noise source disabled.
  ScenarioSpec noiseless() const;
};

/// Lead vehicle 10 m/s slower than the ego; the noiseless first red lands on step 98.
ScenarioSpec mio_minus_10();
/// Lead vehicle 1 m/s faster than the ego, with a distracted trailing vehicle 7 m behind.
ScenarioSpec mio_plus_1();
/// Looks up "mio-10" or "mio+1".
ScenarioSpec scenario_preset(const std::string& name);

struct GroundTruth {
  VehicleTrack ego;
  VehicleTrack mio;
  double d1 = 0, v1 = 0, d2 = 0, v2 = 0;  ///< MIO relative to ego
};

struct Trace {
  std::vector<MeasurementFrame> frames;
  std::vector<GroundTruth> truth;
};

Trace synthesize_trace(const ScenarioSpec& spec);

struct RadarReturn {
  double al = 0;  ///< altitude, radians
  double az = 0;  ///< azimuth, radians
  double d = 0;
  double v = 0;
};

/// (d1, v1, d2, v2) of a radar return.
Vec4 radar_to_detection(const RadarReturn& r);

struct PreprocessOptions {
  int window = 5;
  double threshold = 0.5;  ///< multiple of the scaled median absolute deviation
};

/// Cleans one column. Missing (NaN) samples and moving-median outliers are marked untrusted and
/// rebuilt by linear interpolation between trusted neighbours (linear extension at the edges); detection repeats on the rebuilt
/// column until no further sample is flagged. Throws when the column has no finite value.
std::vector<double> preprocess_column(std::vector<double> x, const PreprocessOptions& opts = {});

/// Applies preprocess_column to the vision slots. Radar slots must already be finite.
std::vector<MeasurementFrame> preprocess(const std::vector<MeasurementFrame>& raw,
                                         const PreprocessOptions& opts = {});

void write_trace_csv(std::ostream& os, const Trace& trace);
Trace read_trace_csv(std::istream& is);
void write_ground_truth_csv(std::ostream& os, const Trace& trace);

}  // namespace fcw
