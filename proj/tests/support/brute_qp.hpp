#pragma once

// Exhaustive active-set oracle for small strictly convex QPs: every admissible active set is
// solved as an equality-constrained problem and the best feasible point wins.

#include "fcw/qp.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace fcw::support {

struct BruteResult {
  bool feasible = false;
  Eigen::VectorXd z;
  double objective = std::numeric_limits<double>::infinity();
};

inline BruteResult brute_force_qp(const QpProblem& p) {
  const int n = p.n(), m = p.m();
  std::vector<int> boxed;  // variables with at least one finite bound
  for (int j = 0; j < n; ++j)
    if (std::isfinite(p.lb(j)) || std::isfinite(p.ub(j))) boxed.push_back(j);
  const int nb = static_cast<int>(boxed.size());
  long long bound_states = 1;
  for (int k = 0; k < nb; ++k) bound_states *= 3;

  BruteResult best;
  for (long long rows = 0; rows < (1LL << m); ++rows) {
    for (long long code = 0; code < bound_states; ++code) {
      // Equality set: chosen general rows plus bounds fixed at lower (1) or upper (2).
      std::vector<Eigen::RowVectorXd> eq;
      std::vector<double> rhs;
      for (int r = 0; r < m; ++r)
        if (rows >> r & 1) {
          eq.push_back(p.G.row(r));
          rhs.push_back(p.h(r));
        }
      long long c = code;
      bool skip = false;
      for (int k = 0; k < nb; ++k, c /= 3) {
        const int state = static_cast<int>(c % 3);
        if (state == 0) continue;
        const double v = state == 1 ? p.lb(boxed[k]) : p.ub(boxed[k]);
        if (!std::isfinite(v)) {
          skip = true;
          break;
        }
        Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(n);
        e(boxed[k]) = 1.0;
        eq.push_back(e);
        rhs.push_back(v);
      }
      if (skip || static_cast<int>(eq.size()) > n) continue;
      const int k = static_cast<int>(eq.size());
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + k, n + k);
      Eigen::VectorXd b(n + k);
      K.topLeftCorner(n, n) = p.P;
      b.head(n) = -p.q;
      for (int i = 0; i < k; ++i) {
        K.block(n + i, 0, 1, n) = eq[static_cast<std::size_t>(i)];
        K.block(0, n + i, n, 1) = eq[static_cast<std::size_t>(i)].transpose();
        b(n + i) = rhs[static_cast<std::size_t>(i)];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd z = lu.solve(b).head(n);
      const double tol = 1e-9;
      bool ok = true;
      for (int r = 0; r < m && ok; ++r) ok = p.G.row(r).dot(z) <= p.h(r) + tol * (1 + std::abs(p.h(r)));
      for (int j = 0; j < n && ok; ++j) ok = z(j) >= p.lb(j) - tol * (1 + std::abs(z(j))) && z(j) <= p.ub(j) + tol * (1 + std::abs(z(j)));
      if (!ok) continue;
      const double f = p.objective(z);
      if (f < best.objective) {
        best.feasible = true;
        best.objective = f;
        best.z = z;
      }
    }
  }
  return best;
}

/// Strictly convex QP with n ≤ 10, a few general rows and bounds on at most three variables.
inline QpProblem random_small_qp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dn(1, 10), dm(0, 5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = dn(rng), m = dm(rng);
  Eigen::MatrixXd B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = g(rng);
  QpProblem p;
  p.P = B * B.transpose() / n + 0.1 * Eigen::MatrixXd::Identity(n, n);
  p.q.resize(n);
  for (int j = 0; j < n; ++j) p.q(j) = 3.0 * g(rng);
  p.G.resize(m, n);
  p.h.resize(m);
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n; ++j) p.G(r, j) = g(rng);
    p.h(r) = g(rng) + 0.5;
  }
  p.lb = Eigen::VectorXd::Constant(n, -std::numeric_limits<double>::infinity());
  p.ub = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  const int nb = std::min(n, 3);
  for (int j = 0; j < nb; ++j) {
    const double draw = u(rng);
    if (draw < 0.33) p.lb(j) = -1.0 - u(rng);
    else if (draw < 0.66) p.ub(j) = 1.0 + u(rng);
    else {
      p.lb(j) = -0.5 - u(rng);
      p.ub(j) = 0.5 + u(rng);
    }
  }
  return p;
}

}  // namespace fcw::support
