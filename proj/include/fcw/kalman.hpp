#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace fcw {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat86 = Eigen::Matrix<double, 8, 6>;
using Mat68 = Eigen::Matrix<double, 6, 8>;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Slot indices of the state vector.
namespace state {
constexpr int d1 = 0, v1 = 1, a1 = 2, d2 = 3, v2 = 4, a2 = 5;
}

/// Slot indices of the measurement vector: vision block first, radar block second.
namespace meas {
constexpr int vd1 = 0, vv1 = 1, vd2 = 2, vv2 = 3;
constexpr int rd1 = 4, rv1 = 5, rd2 = 6, rv2 = 7;
constexpr int vision_begin = 0, radar_begin = 4, block = 4;
}

/// Kalman filter state of the tracked lead vehicle.
struct TrackState {
  double d1 = 0, v1 = 0, a1 = 0, d2 = 0, v2 = 0, a2 = 0;

  static TrackState from_vector(const Vec6& x);
  Vec6 vector() const;
};

/// One vision+radar detection. Missing vision entries are NaN before preprocessing.
struct MeasurementFrame {
  Vec8 y = Vec8::Zero();

  Vec4 vision() const { return y.head<4>(); }
  Vec4 radar() const { return y.tail<4>(); }
  bool finite() const { return y.allFinite(); }
};

struct KfModel {
  Mat6 A = Mat6::Identity();
  Mat86 C = Mat86::Zero();
  Mat6 Omega = Mat6::Zero();
  Mat8 Psi = Mat8::Identity();
  double dt = 0.05;
};

/// Noise parameters of the constant-acceleration model.
struct KfNoise {
  double accel_intensity = 5.0;  ///< per-axis white-jerk intensity q
  double vision_variance = 1.0;
  double radar_variance = 5.0;
  double sigma0 = 100.0;  ///< diagonal of the initial covariance
};

/// Block-diagonal constant-acceleration model with (d, v) of each axis observed by both sensors.
KfModel constant_acceleration_model(double dt, const KfNoise& noise = {});

/// Measurement matrix shared by every model in this library.
Mat86 measurement_matrix();

struct FilterState {
  Vec6 xhat = Vec6::Zero();  ///< prediction x̂_t
  Mat6 Sigma = Mat6::Zero();  ///< Σ̂_t
  Vec6 xbar = Vec6::Zero();  ///< corrected estimate x̄_t
  Mat6 Sigmabar = Mat6::Zero();
  Mat68 H = Mat68::Zero();  ///< gain used by the last correction
  bool corrected = false;
};

FilterState kf_init(const Vec4& first_vision, const Vec4& first_radar, const Mat6& sigma0);

/// Gain H = Σ Cᵀ (C Σ Cᵀ + Ψ)⁻¹.
Mat68 kalman_gain(const KfModel& model, const Mat6& Sigma);

FilterState kf_correct(const FilterState& fs, const MeasurementFrame& y, const KfModel& model);
FilterState kf_predict(const FilterState& fs, const KfModel& model);

struct CovarianceStep {
  Mat6 Sigma;  ///< Σ̂_t
  Mat68 H;  ///< H_t = gain computed from Σ̂_t
};

/// Entry k holds (Σ̂_{k+1}, H_{k+1}); the correction at step t uses entry t-2.
std::vector<CovarianceStep> precompute_covariances(const KfModel& model, const Mat6& sigma0, int T);

/// Corrects and predicts once per frame. Output k is the state after consuming trace[k].
std::vector<FilterState> run_filter(const KfModel& model, const FilterState& init,
                                    const std::vector<MeasurementFrame>& trace);

/// Initializes from the first frame and filters the rest; element t-1 holds x̂_t.
std::vector<FilterState> track(const KfModel& model, const Mat6& sigma0,
                               const std::vector<MeasurementFrame>& trace);

}  // namespace fcw
