#pragma once

#include "fcw/alert.hpp"
#include "fcw/kalman.hpp"
#include "fcw/qp.hpp"
#include "fcw/surrogate.hpp"

#include <limits>
#include <string>
#include <vector>

namespace fcw {

/// Closed range of 1-based steps; empty when last < first.
struct Interval {
  int first = 1;
  int last = 0;

  bool empty() const { return last < first; }
  int size() const { return empty() ? 0 : last - first + 1; }
  bool contains(int t) const { return t >= first && t <= last; }
};

struct AttackConfig {
  Interval target;  ///< T†
  Interval stealthy;  ///< Tˢ, immediately before T† (may be empty)
  std::vector<Light> target_lights;  ///< one per step of T†
  std::vector<Light> original_lights;  ///< one per step of Tˢ
  double delta = std::numeric_limits<double>::infinity();  ///< per-component bound on manipulations
  double lambda = 1e10;
  Mat8 R = Mat8::Identity();
  double d_min = 0.0, d_max = 75.0;
  double v_min = -30.0, v_max = 30.0;
  double epsilon = 1e-3;
  double qp_tol = 1e-8;
  int qp_max_iter = 50000;

  /// Tᵃ = Tˢ ∪ T†.
  Interval attack() const;
  /// Light the attacker wants at step t ∈ Tᵃ.
  Light desired_light(int t) const;
  SurrogateParams surrogate() const { return {epsilon, d_max}; }
  void validate() const;
};

class AttackError : public Error {
public:
  AttackError(int step, const std::string& what) : Error(what), step_(step) {}
  int step() const { return step_; }

private:
  int step_;
};

/// x̃_τ = M_τ + Σ_{s≤τ} N_{τ,s} δ_s over a horizon of consecutive steps.
struct AffineRollout {
  int inputs = 4;  ///< manipulation components per step
  std::vector<Vec6> M;
  std::vector<Eigen::MatrixXd> N;  ///< 6 × (inputs·horizon); blocks with s > τ are zero

  int horizon() const { return static_cast<int>(M.size()); }
  /// N_{τ,s} for horizon offsets i (τ) and j (s).
  Eigen::MatrixXd block(int i, int j) const { return N[static_cast<std::size_t>(i)].middleCols(inputs * j, inputs); }
  /// State at offset i for stacked manipulations (inputs·horizon entries).
  Vec6 evaluate(int i, const Eigen::VectorXd& deltas) const;
};

/// Maps a manipulation of the vision block into the measurement vector.
Eigen::MatrixXd vision_input_map();

/// gains[i] is the gain applied at horizon offset i (H_{τ-1}); ys[i] the baseline measurement.
AffineRollout build_affine_rollout(const KfModel& model, const Vec6& x_start, const std::vector<Mat68>& gains,
                                   const std::vector<Vec8>& ys, int horizon,
                                   const Eigen::MatrixXd& input_map = vision_input_map());

/// ŷ for the next `horizon` steps: C A^k x for k = 1..horizon.
std::vector<Vec8> predict_future_measurements(const Vec6& xhat, const KfModel& model, int horizon);

struct VariableLayout {
  int first_step = 0;
  int horizon = 0;

  int delta(int i, int component) const { return 4 * i + component; }
  int xi(int i) const { return 4 * horizon + 2 * i; }
  int zeta(int i) const { return 4 * horizon + 2 * i + 1; }
  int size() const { return 6 * horizon; }
};

struct InnerQp {
  QpProblem problem;
  VariableLayout layout;
};

/// Inner problem at step t over [t, end of Tᵃ]; ys are the baseline measurements of those steps.
InnerQp assemble_inner_qp(const AttackConfig& cfg, const AffineRollout& rollout, const std::vector<Vec8>& ys, int t);

struct Metrics {
  int v_target = 0;  ///< V†
  int v_stealthy = 0;  ///< Vˢ
  double j1 = 0, j2 = 0, j3 = 0, j = 0;
};

struct QpLogEntry {
  int step = 0;
  int variables = 0;
  int constraints = 0;
  int iterations = 0;
  double kkt_residual = 0;
  double objective = 0;
};

/// Per-step vectors are indexed by step-1 over the whole trace.
struct AttackResult {
  std::string strategy;
  Interval target;
  Interval stealthy;
  std::vector<Vec8> true_y;
  std::vector<Vec8> attacked_y;
  std::vector<Vec8> delta;
  std::vector<Vec6> clean_states;  ///< x̂_t from true measurements
  std::vector<Vec6> attacked_states;  ///< x̃_t seen by the victim
  std::vector<Light> lights_before;
  std::vector<Light> lights_after;
  std::vector<double> xi, zeta;  ///< achieved slacks (zero outside Tᵃ)
  std::vector<QpLogEntry> qp_log;
  Metrics metrics;
};

/// Online attacker: feed true measurements one step at a time and receive the manipulated ones.
class MpcAttacker {
public:
  MpcAttacker(AttackConfig cfg, KfModel model, const Mat6& sigma0, int T);

  /// Consumes y_t for the next step and returns ỹ_t.
  Vec8 step(const Vec8& y);
  int steps_consumed() const { return t_; }
  /// Result over the consumed steps.
  AttackResult result() const;

private:
  AttackConfig cfg_;
  KfModel model_;
  Mat6 sigma0_;
  int T_;
  int t_ = 0;
  std::vector<CovarianceStep> gains_;
  FilterState clean_;
  FilterState attacked_;
  AttackResult res_;
};

AttackResult mpc_attack(const AttackConfig& cfg, const KfModel& model, const Mat6& sigma0,
                        const std::vector<MeasurementFrame>& trace);

AttackResult greedy_attack(const AttackConfig& cfg, const KfModel& model, const Mat6& sigma0,
                           const std::vector<MeasurementFrame>& trace);

/// Filters the unmodified trace and reports it in the AttackResult shape.
AttackResult no_attack(const AttackConfig& cfg, const KfModel& model, const Mat6& sigma0,
                       const std::vector<MeasurementFrame>& trace);

/// V†, Vˢ from lights recomputed on attacked states; J terms from achieved surrogate violations.
Metrics compute_metrics(const AttackResult& result, const AttackConfig& cfg);

/// Fills lights_after, xi, zeta and metrics from the attacked states.
void finalize_result(AttackResult& result, const AttackConfig& cfg);

}  // namespace fcw
