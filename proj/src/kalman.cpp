#include "fcw/kalman.hpp"

#include <cmath>
#include <string>

namespace fcw {

TrackState TrackState::from_vector(const Vec6& x) {
  return {x(0), x(1), x(2), x(3), x(4), x(5)};
}

Vec6 TrackState::vector() const {
  Vec6 x;
  x << d1, v1, a1, d2, v2, a2;
  return x;
}

Mat86 measurement_matrix() {
  Mat86 C = Mat86::Zero();
  const int observed[4] = {state::d1, state::v1, state::d2, state::v2};
  for (int k = 0; k < 4; ++k) {
    C(meas::vision_begin + k, observed[k]) = 1.0;
    C(meas::radar_begin + k, observed[k]) = 1.0;
  }
  return C;
}

KfModel constant_acceleration_model(double dt, const KfNoise& noise) {
  if (!(dt > 0)) throw Error("model: dt must be positive");
  if (noise.accel_intensity < 0 || !(noise.vision_variance > 0) || !(noise.radar_variance > 0))
    throw Error("model: noise intensities must be non-negative and measurement variances positive");
  KfModel m;
  m.dt = dt;
  Eigen::Matrix3d block;
  block << 1, dt, 0.5 * dt * dt, 0, 1, dt, 0, 0, 1;
  m.A.setZero();
  m.A.block<3, 3>(0, 0) = block;
  m.A.block<3, 3>(3, 3) = block;
  m.C = measurement_matrix();
  const double q = noise.accel_intensity;
  Eigen::Vector3d om(q * std::pow(dt, 5) / 20.0, q * std::pow(dt, 3) / 3.0, q * dt);
  m.Omega.setZero();
  m.Omega.diagonal() << om, om;
  m.Psi.setZero();
  m.Psi.diagonal() << Vec4::Constant(noise.vision_variance), Vec4::Constant(noise.radar_variance);
  return m;
}

FilterState kf_init(const Vec4& first_vision, const Vec4& first_radar, const Mat6& sigma0) {
  if (!first_vision.allFinite() || !first_radar.allFinite())
    throw Error("kf_init: first vision and radar measurements must be finite");
  const Vec4 mean = 0.5 * (first_vision + first_radar);
  FilterState fs;
  fs.xhat << mean(0), mean(1), 0.0, mean(2), mean(3), 0.0;
  fs.Sigma = sigma0;
  return fs;
}

Mat68 kalman_gain(const KfModel& model, const Mat6& Sigma) {
  const Mat8 S = model.C * Sigma * model.C.transpose() + model.Psi;
  Eigen::LLT<Mat8> llt(S);
  if (llt.info() != Eigen::Success)
    throw Error("kf_correct: innovation covariance C*Sigma*C^T + Psi is not positive definite");
  // H = Σ Cᵀ S⁻¹  <=>  S Hᵀ = C Σ
  const Mat86 Ht = llt.solve(model.C * Sigma);
  return Ht.transpose();
}

FilterState kf_correct(const FilterState& fs, const MeasurementFrame& y, const KfModel& model) {
  FilterState out = fs;
  out.H = kalman_gain(model, fs.Sigma);
  const Mat6 IKC = Mat6::Identity() - out.H * model.C;
  out.xbar = IKC * fs.xhat + out.H * y.y;
  out.Sigmabar = IKC * fs.Sigma;
  out.corrected = true;
  return out;
}

FilterState kf_predict(const FilterState& fs, const KfModel& model) {
  if (!fs.corrected) throw Error("kf_predict: filter state has not been corrected");
  FilterState out = fs;
  out.xhat = model.A * fs.xbar;
  const Mat6 S = model.A * fs.Sigmabar * model.A.transpose() + model.Omega;
  out.Sigma = 0.5 * (S + S.transpose());
  out.corrected = false;
  return out;
}

std::vector<CovarianceStep> precompute_covariances(const KfModel& model, const Mat6& sigma0, int T) {
  if (T < 1) throw Error("precompute_covariances: T must be at least 1");
  std::vector<CovarianceStep> seq;
  seq.reserve(static_cast<std::size_t>(T));
  FilterState fs;
  fs.Sigma = sigma0;
  for (int t = 0; t < T; ++t) {
    const Mat68 H = kalman_gain(model, fs.Sigma);
    seq.push_back({fs.Sigma, H});
    fs.Sigmabar = (Mat6::Identity() - H * model.C) * fs.Sigma;
    const Mat6 S = model.A * fs.Sigmabar * model.A.transpose() + model.Omega;
    fs.Sigma = 0.5 * (S + S.transpose());
  }
  return seq;
}

std::vector<FilterState> run_filter(const KfModel& model, const FilterState& init,
                                    const std::vector<MeasurementFrame>& trace) {
  std::vector<FilterState> out;
  out.reserve(trace.size());
  FilterState fs = init;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (!trace[k].finite())
      throw Error("run_filter: non-finite measurement at frame " + std::to_string(k + 1));
    try {
      fs = kf_predict(kf_correct(fs, trace[k], model), model);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " (frame " + std::to_string(k + 1) + ")");
    }
    out.push_back(fs);
  }
  return out;
}

std::vector<FilterState> track(const KfModel& model, const Mat6& sigma0,
                               const std::vector<MeasurementFrame>& trace) {
  if (trace.empty()) throw Error("track: empty trace");
  std::vector<FilterState> out;
  out.reserve(trace.size());
  out.push_back(kf_init(trace[0].vision(), trace[0].radar(), sigma0));
  const std::vector<MeasurementFrame> rest(trace.begin() + 1, trace.end());
  auto tail = run_filter(model, out.front(), rest);
  out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace fcw
