#include "fcw/attacker.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fcw {

namespace {

MeasurementFrame frame_of(const Vec8& y) {
  MeasurementFrame f;
  f.y = y;
  return f;
}

void check_trace(const std::vector<MeasurementFrame>& trace, const AttackConfig& cfg) {
  if (trace.empty()) throw Error("attack: empty trace");
  for (std::size_t t = 0; t < trace.size(); ++t)
    if (!trace[t].finite())
      throw Error("attack: frame " + std::to_string(t + 1) + " has missing values; preprocess the trace first");
  if (cfg.attack().last > static_cast<int>(trace.size()))
    throw Error("attack: attack window ends at step " + std::to_string(cfg.attack().last) + " but the trace has " +
                std::to_string(trace.size()) + " frames");
}

// Runs the victim filter on a manipulated trace and the clean filter on the true one.
AttackResult filter_both(const std::string& strategy, const AttackConfig& cfg, const KfModel& model,
                         const Mat6& sigma0, const std::vector<MeasurementFrame>& trace,
                         const std::vector<Vec8>& attacked) {
  AttackResult r;
  r.strategy = strategy;
  r.target = cfg.target;
  r.stealthy = cfg.stealthy;
  std::vector<MeasurementFrame> fake(trace.size());
  for (std::size_t t = 0; t < trace.size(); ++t) {
    r.true_y.push_back(trace[t].y);
    r.attacked_y.push_back(attacked[t]);
    r.delta.push_back(attacked[t] - trace[t].y);
    fake[t].y = attacked[t];
  }
  for (const FilterState& fs : track(model, sigma0, trace)) {
    r.clean_states.push_back(fs.xhat);
    r.lights_before.push_back(classify(fs.xhat));
  }
  for (const FilterState& fs : track(model, sigma0, fake)) r.attacked_states.push_back(fs.xhat);
  finalize_result(r, cfg);
  return r;
}

}  // namespace

Interval AttackConfig::attack() const {
  if (stealthy.empty()) return target;
  return {stealthy.first, target.last};
}

Light AttackConfig::desired_light(int t) const {
  if (target.contains(t)) return target_lights[static_cast<std::size_t>(t - target.first)];
  if (stealthy.contains(t)) return original_lights[static_cast<std::size_t>(t - stealthy.first)];
  throw Error("attack: step " + std::to_string(t) + " is outside the attack window");
}

void AttackConfig::validate() const {
  if (target.empty()) throw Error("attack: target window is empty");
  if (target.first < 2) throw Error("attack: target window must start at step 2 or later");
  if (static_cast<int>(target_lights.size()) != target.size())
    throw Error("attack: expected " + std::to_string(target.size()) + " target lights, got " +
                std::to_string(target_lights.size()));
  if (!stealthy.empty()) {
    if (stealthy.first < 2) throw Error("attack: stealthy window must start at step 2 or later");
    if (stealthy.last != target.first - 1)
      throw Error("attack: stealthy window must end immediately before the target window");
  }
  if (static_cast<int>(original_lights.size()) != stealthy.size())
    throw Error("attack: expected " + std::to_string(stealthy.size()) + " original lights, got " +
                std::to_string(original_lights.size()));
  if (!(delta >= 0)) throw Error("attack: delta must be non-negative");
  if (!(lambda > 0)) throw Error("attack: lambda must be positive");
  if (!(epsilon > 0)) throw Error("attack: epsilon must be positive");
  if (!(d_min < d_max) || !(v_min < v_max)) throw Error("attack: empty physical bounds");
  if (!R.isApprox(R.transpose())) throw Error("attack: R must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(R.topLeftCorner<4, 4>());
  if (es.eigenvalues().minCoeff() <= 0) throw Error("attack: vision block of R must be positive definite");
}

Vec6 AffineRollout::evaluate(int i, const Eigen::VectorXd& deltas) const {
  const auto& n = N[static_cast<std::size_t>(i)];
  if (deltas.size() != n.cols()) throw Error("rollout: expected " + std::to_string(n.cols()) + " manipulations");
  return M[static_cast<std::size_t>(i)] + n * deltas;
}

Eigen::MatrixXd vision_input_map() {
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(8, 4);
  E.topRows(4).setIdentity();
  return E;
}

AffineRollout build_affine_rollout(const KfModel& model, const Vec6& x_start, const std::vector<Mat68>& gains,
                                   const std::vector<Vec8>& ys, int horizon, const Eigen::MatrixXd& input_map) {
  if (horizon < 1) throw Error("rollout: horizon must be positive");
  if (static_cast<int>(gains.size()) < horizon || static_cast<int>(ys.size()) < horizon)
    throw Error("rollout: need " + std::to_string(horizon) + " gains and measurements");
  if (input_map.rows() != 8) throw Error("rollout: input map must have 8 rows");
  AffineRollout r;
  r.inputs = static_cast<int>(input_map.cols());
  const int k = r.inputs;
  Vec6 x = x_start;
  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(6, k * horizon);
  for (int i = 0; i < horizon; ++i) {
    const Mat68& H = gains[static_cast<std::size_t>(i)];
    const Mat6 F = model.A * (Mat6::Identity() - H * model.C);
    const Mat68 AH = model.A * H;
    x = F * x + AH * ys[static_cast<std::size_t>(i)];
    if (i > 0) n.leftCols(k * i) = F * n.leftCols(k * i);
    n.middleCols(k * i, k) = AH * input_map;
    r.M.push_back(x);
    r.N.push_back(n);
  }
  return r;
}

std::vector<Vec8> predict_future_measurements(const Vec6& xhat, const KfModel& model, int horizon) {
  std::vector<Vec8> out;
  Vec6 x = xhat;
  for (int k = 0; k < horizon; ++k) {
    x = model.A * x;
    out.push_back(model.C * x);
  }
  return out;
}

InnerQp assemble_inner_qp(const AttackConfig& cfg, const AffineRollout& rollout, const std::vector<Vec8>& ys, int t) {
  const Interval window = cfg.attack();
  if (!window.contains(t)) throw Error("inner QP: step " + std::to_string(t) + " is outside the attack window");
  const int h = window.last - t + 1;
  if (rollout.horizon() != h || rollout.inputs != 4)
    throw Error("inner QP: rollout horizon " + std::to_string(rollout.horizon()) + " does not match " +
                std::to_string(h) + " remaining attack steps");
  if (static_cast<int>(ys.size()) < h) throw Error("inner QP: missing baseline measurements");

  InnerQp out;
  out.layout = {t, h};
  const VariableLayout& L = out.layout;
  const int n = L.size();
  QpProblem& p = out.problem;
  p = QpProblem::unconstrained(Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Zero(n));
  const Eigen::Matrix4d Rvv = cfg.R.topLeftCorner<4, 4>();
  for (int i = 0; i < h; ++i) {
    p.P.block(L.delta(i, 0), L.delta(i, 0), 4, 4) = 2.0 * Rvv;
    p.P(L.xi(i), L.xi(i)) = 2.0 * cfg.lambda;
    p.P(L.zeta(i), L.zeta(i)) = 2.0 * cfg.lambda;
  }

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  const SurrogateParams sp = cfg.surrogate();
  for (int i = 0; i < h; ++i) {
    const auto& N = rollout.N[static_cast<std::size_t>(i)];
    const Vec6& M = rollout.M[static_cast<std::size_t>(i)];
    for (const LinearConstraint& c : slacken(surrogate_for(cfg.desired_light(t + i), sp))) {
      Eigen::RowVectorXd g = Eigen::RowVectorXd::Zero(n);
      g.head(4 * (i + 1)) = c.a_d * N.row(state::d1).head(4 * (i + 1)) + c.a_v * N.row(state::v1).head(4 * (i + 1));
      if (c.slack) g(*c.slack == SlackFamily::xi ? L.xi(i) : L.zeta(i)) = -1.0;
      rows.push_back(std::move(g));
      rhs.push_back(c.c - c.a_d * M(state::d1) - c.a_v * M(state::v1));
    }
  }
  p.G.resize(static_cast<Eigen::Index>(rows.size()), n);
  p.h.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    p.G.row(static_cast<Eigen::Index>(r)) = rows[r];
    p.h(static_cast<Eigen::Index>(r)) = rhs[r];
  }

  // Manipulated readings stay in the physical range, relaxed where the true reading already leaves it.
  for (int i = 0; i < h; ++i) {
    const Vec8& y = ys[static_cast<std::size_t>(i)];
    for (int c = 0; c < 4; ++c) {
      double lo = -cfg.delta, hi = cfg.delta;
      const double v = y(meas::vision_begin + c);
      if (c == meas::vd1) {
        lo = std::max(lo, std::min(cfg.d_min, v) - v);
        hi = std::min(hi, std::max(cfg.d_max, v) - v);
      } else if (c == meas::vv1) {
        lo = std::max(lo, std::min(cfg.v_min, v) - v);
        hi = std::min(hi, std::max(cfg.v_max, v) - v);
      }
      p.lb(L.delta(i, c)) = lo;
      p.ub(L.delta(i, c)) = hi;
    }
  }
  return out;
}

MpcAttacker::MpcAttacker(AttackConfig cfg, KfModel model, const Mat6& sigma0, int T)
    : cfg_(std::move(cfg)), model_(std::move(model)), sigma0_(sigma0), T_(T) {
  cfg_.validate();
  if (cfg_.attack().last > T_)
    throw Error("attack: attack window ends at step " + std::to_string(cfg_.attack().last) + " beyond T = " +
                std::to_string(T_));
  gains_ = precompute_covariances(model_, sigma0_, T_);
  res_.strategy = "mpc";
  res_.target = cfg_.target;
  res_.stealthy = cfg_.stealthy;
}

Vec8 MpcAttacker::step(const Vec8& y) {
  if (t_ >= T_) throw Error("attack: all " + std::to_string(T_) + " steps already consumed");
  if (!y.allFinite()) throw Error("attack: measurement at step " + std::to_string(t_ + 1) + " is not finite");
  const int t = ++t_;
  Vec8 out = y;
  if (t == 1) {
    clean_ = kf_init(y.head<4>(), y.tail<4>(), sigma0_);
    attacked_ = clean_;
  } else {
    clean_ = kf_correct(clean_, frame_of(y), model_);
    const Vec6 xbar = clean_.xbar;
    clean_ = kf_predict(clean_, model_);
    const Interval window = cfg_.attack();
    if (window.contains(t)) {
      const int h = window.last - t + 1;
      std::vector<Vec8> ys{y};
      for (const Vec8& f : predict_future_measurements(xbar, model_, h - 1)) ys.push_back(f);
      std::vector<Mat68> gains;
      for (int i = 0; i < h; ++i) gains.push_back(gains_[static_cast<std::size_t>(t + i - 2)].H);
      const AffineRollout roll = build_affine_rollout(model_, attacked_.xhat, gains, ys, h);
      const InnerQp qp = assemble_inner_qp(cfg_, roll, ys, t);
      const QpSolution sol = solve(qp.problem, cfg_.qp_tol, cfg_.qp_max_iter);
      if (sol.status != QpStatus::optimal) {
        std::ostringstream msg;
        msg << "attack: inner QP at step " << t << " ended with status " << to_string(sol.status) << ": "
            << sol.diagnostic;
        throw AttackError(t, msg.str());
      }
      out.head<4>() += sol.z.head<4>();
      res_.qp_log.push_back({t, qp.problem.n(), qp.problem.m(), sol.iterations, sol.kkt_residual, sol.objective});
    }
    attacked_ = kf_correct(attacked_, frame_of(out), model_);
    attacked_ = kf_predict(attacked_, model_);
  }
  res_.true_y.push_back(y);
  res_.attacked_y.push_back(out);
  res_.delta.push_back(out - y);
  res_.clean_states.push_back(clean_.xhat);
  res_.attacked_states.push_back(attacked_.xhat);
  res_.lights_before.push_back(classify(clean_.xhat));
  return out;
}

AttackResult MpcAttacker::result() const {
  AttackResult r = res_;
  finalize_result(r, cfg_);
  return r;
}

AttackResult mpc_attack(const AttackConfig& cfg, const KfModel& model, const Mat6& sigma0,
                        const std::vector<MeasurementFrame>& trace) {
  cfg.validate();
  check_trace(trace, cfg);
  MpcAttacker attacker(cfg, model, sigma0, static_cast<int>(trace.size()));
  for (const MeasurementFrame& f : trace) attacker.step(f.y);
  return attacker.result();
}

AttackResult greedy_attack(const AttackConfig& cfg, const KfModel& model, const Mat6& sigma0,
                           const std::vector<MeasurementFrame>& trace) {
  cfg.validate();
  check_trace(trace, cfg);
  std::vector<Vec8> fake;
  const Interval window = cfg.attack();
  // The push direction follows the target light over the whole window, stealthy steps included.
  const Light goal = cfg.target_lights.front();
  if (std::any_of(cfg.target_lights.begin(), cfg.target_lights.end(), [&](Light l) { return l != goal; }))
    throw Error("greedy attack: target lights must all be the same");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const int t = static_cast<int>(i) + 1;
    Vec8 y = trace[i].y;
    if (window.contains(t)) {
      double& d = y(meas::vd1);
      double& v = y(meas::vv1);
      switch (goal) {
        case Light::green:
          d = std::max(d, std::min(d + cfg.delta, cfg.d_max));
          v = std::max(v, std::min(v + cfg.delta, cfg.v_max));
          break;
        case Light::red:
          d = std::min(d, std::max(d - cfg.delta, cfg.d_min));
          v = std::min(v, std::max(v - cfg.delta, cfg.v_min));
          break;
        case Light::yellow:
          throw Error("greedy attack: yellow target lights are not supported");
      }
    }
    fake.push_back(y);
  }
  return filter_both("greedy", cfg, model, sigma0, trace, fake);
}

AttackResult no_attack(const AttackConfig& cfg, const KfModel& model, const Mat6& sigma0,
                       const std::vector<MeasurementFrame>& trace) {
  cfg.validate();
  check_trace(trace, cfg);
  std::vector<Vec8> ys;
  for (const MeasurementFrame& f : trace) ys.push_back(f.y);
  return filter_both("none", cfg, model, sigma0, trace, ys);
}

Metrics compute_metrics(const AttackResult& result, const AttackConfig& cfg) {
  Metrics m;
  const SurrogateParams sp = cfg.surrogate();
  for (std::size_t i = 0; i < result.attacked_states.size(); ++i) {
    const int t = static_cast<int>(i) + 1;
    const Vec6& x = result.attacked_states[i];
    const Vec8& d = result.delta[i];
    m.j1 += d.dot(cfg.R * d);
    if (!cfg.attack().contains(t)) continue;
    const Light want = cfg.desired_light(t);
    const auto [xi, zeta] = required_slacks(want, sp, x(state::d1), x(state::v1));
    const double s = xi * xi + zeta * zeta;
    const bool miss = classify(x) != want;
    if (cfg.target.contains(t)) {
      m.j3 += s;
      m.v_target += miss;
    } else {
      m.j2 += s;
      m.v_stealthy += miss;
    }
  }
  m.j = m.j1 + cfg.lambda * (m.j2 + m.j3);
  return m;
}

void finalize_result(AttackResult& r, const AttackConfig& cfg) {
  const std::size_t T = r.attacked_states.size();
  r.lights_after.assign(T, Light::green);
  r.xi.assign(T, 0.0);
  r.zeta.assign(T, 0.0);
  const SurrogateParams sp = cfg.surrogate();
  for (std::size_t i = 0; i < T; ++i) {
    const Vec6& x = r.attacked_states[i];
    r.lights_after[i] = classify(x);
    const int t = static_cast<int>(i) + 1;
    if (cfg.attack().contains(t))
      std::tie(r.xi[i], r.zeta[i]) = required_slacks(cfg.desired_light(t), sp, x(state::d1), x(state::v1));
  }
  r.metrics = compute_metrics(r, cfg);
}

}  // namespace fcw
