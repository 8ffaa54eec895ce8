#pragma once

#include "fcw/kalman.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>

namespace fcw {

/// minimize ½ zᵀPz + qᵀz  subject to  G z ≤ h,  lb ≤ z ≤ ub.
struct QpProblem {
  Eigen::MatrixXd P;
  Eigen::VectorXd q;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::VectorXd lb;  ///< -inf allowed
  Eigen::VectorXd ub;  ///< +inf allowed

  /// Unconstrained problem with infinite bounds.
  static QpProblem unconstrained(const Eigen::MatrixXd& P, const Eigen::VectorXd& q);

  int n() const { return static_cast<int>(q.size()); }
  int m() const { return static_cast<int>(h.size()); }
  void validate() const;
  double objective(const Eigen::VectorXd& z) const;
};

enum class QpStatus { optimal, max_iter, infeasible };

std::string to_string(QpStatus s);

struct QpSolution {
  Eigen::VectorXd z;
  double objective = 0;
  double kkt_residual = 0;
  int iterations = 0;
  QpStatus status = QpStatus::max_iter;
  Eigen::VectorXd y;  ///< multipliers of G z ≤ h
  Eigen::VectorXd y_lower;  ///< multipliers of lb ≤ z
  Eigen::VectorXd y_upper;  ///< multipliers of z ≤ ub
  /// Index of the most violated constraint when not optimal: rows of G first, then lower
  /// bounds (m + j), then upper bounds (m + n + j).
  std::optional<int> worst_constraint;
  double worst_violation = 0;
  std::string diagnostic;
};

/// Dual active-set solver (Goldfarb–Idnani). Positive semidefinite P is handled with a
/// proximal-point outer loop.
QpSolution solve(const QpProblem& p, double tol = 1e-8, int max_iter = 50000);

struct KktBreakdown {
  double primal = 0;
  double dual = 0;  ///< negative multipliers
  double stationarity = 0;
  double complementarity = 0;
  double max() const;
};

KktBreakdown kkt_breakdown(const QpProblem& p, const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                           const Eigen::VectorXd& y_lower, const Eigen::VectorXd& y_upper);

double kkt_residual(const QpProblem& p, const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& y_lower, const Eigen::VectorXd& y_upper);

/// Residual at multipliers implied by z: non-negative least squares over the near-active set.
double kkt_residual(const QpProblem& p, const Eigen::VectorXd& z);

std::string describe_constraint(const QpProblem& p, int index);

/// Text dump: one "# name rows cols" header per block followed by row-major CSV lines.
void write_problem(std::ostream& os, const QpProblem& p);
QpProblem read_problem(std::istream& is);

}  // namespace fcw
