#pragma once

#include "fcw/qp.hpp"

#include <limits>
#include <random>

namespace fcw::support {

/// Random convex QP whose optimum is certified by construction: a point z* and
/// non-negative multipliers are drawn first, then q and h are chosen so that the
/// KKT conditions hold exactly at z*.
struct KnownQp {
  QpProblem problem;
  Eigen::VectorXd z_star;
  double f_star;
};

inline KnownQp random_known_qp(std::mt19937_64& rng, int max_n = 10, int max_m = 20) {
  std::uniform_int_distribution<int> n_dist(1, max_n);
  std::uniform_int_distribution<int> m_dist(0, max_m);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double inf = std::numeric_limits<double>::infinity();

  const int n = n_dist(rng);
  const int m = m_dist(rng);
  std::uniform_int_distribution<int> rank_dist(0, n);
  const int rank = u01(rng) < 0.5 ? n : rank_dist(rng);

  Eigen::MatrixXd B(n, std::max(rank, 1));
  for (int i = 0; i < B.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j) B(i, j) = rank == 0 ? 0.0 : gauss(rng);
  KnownQp k;
  QpProblem& p = k.problem;
  p.P = B * B.transpose();
  p.P = 0.5 * (p.P + p.P.transpose());

  k.z_star.resize(n);
  for (int j = 0; j < n; ++j) k.z_star(j) = 6.0 * u01(rng) - 3.0;

  p.G.resize(m, n);
  p.h.resize(m);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) p.G(i, j) = gauss(rng);
    const double gz = p.G.row(i).dot(k.z_star);
    if (u01(rng) < 0.5) {
      p.h(i) = gz;
      mu(i) = u01(rng) < 0.2 ? 0.0 : 2.0 * u01(rng);
    } else {
      p.h(i) = gz + 0.1 + 2.0 * u01(rng);
    }
  }
  p.lb = Eigen::VectorXd::Constant(n, -inf);
  p.ub = Eigen::VectorXd::Constant(n, inf);
  Eigen::VectorXd yl = Eigen::VectorXd::Zero(n), yu = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j) {
    const double r = u01(rng);
    if (r < 0.15) {
      p.lb(j) = k.z_star(j);
      yl(j) = 2.0 * u01(rng);
    } else if (r < 0.3) {
      p.ub(j) = k.z_star(j);
      yu(j) = 2.0 * u01(rng);
    } else if (r < 0.6) {
      p.lb(j) = k.z_star(j) - 0.1 - 2.0 * u01(rng);
      p.ub(j) = k.z_star(j) + 0.1 + 2.0 * u01(rng);
    }
  }
  p.q = -p.P * k.z_star - p.G.transpose() * mu + yl - yu;
  k.f_star = p.objective(k.z_star);
  return k;
}

}  // namespace fcw::support
