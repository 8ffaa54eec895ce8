#include "fcw/qp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

namespace fcw {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Every constraint in the solver's orientation nᵀz ≥ b.
struct Constraint {
  enum Kind { row, lower, upper } kind;
  int index;
  double b;
  double norm;
};

class ConstraintSet {
public:
  explicit ConstraintSet(const QpProblem& p) : p_(p) {
    for (int i = 0; i < p.m(); ++i) {
      const double nrm = p.G.row(i).norm();
      list_.push_back({Constraint::row, i, -p.h(i), nrm});
    }
    for (int j = 0; j < p.n(); ++j)
      if (std::isfinite(p.lb(j))) list_.push_back({Constraint::lower, j, p.lb(j), 1.0});
    for (int j = 0; j < p.n(); ++j)
      if (std::isfinite(p.ub(j))) list_.push_back({Constraint::upper, j, -p.ub(j), 1.0});
  }

  /// Copy with every constraint loosened by eps·(1+|b|), staggered to break degenerate ties.
  ConstraintSet relaxed(double eps) const {
    ConstraintSet c = *this;
    for (std::size_t i = 0; i < c.list_.size(); ++i) {
      const double stagger = 1.0 + 0.5 * std::fmod(0.6180339887498949 * static_cast<double>(i), 1.0);
      c.list_[i].b -= eps * stagger * (1.0 + std::abs(c.list_[i].b));
    }
    return c;
  }

  int size() const { return static_cast<int>(list_.size()); }
  const Constraint& operator[](int i) const { return list_[static_cast<std::size_t>(i)]; }

  // n_iᵀ v
  double dot(int i, const VectorXd& v) const {
    const Constraint& c = list_[static_cast<std::size_t>(i)];
    switch (c.kind) {
      case Constraint::row: return -p_.G.row(c.index).dot(v);
      case Constraint::lower: return v(c.index);
      case Constraint::upper: return -v(c.index);
    }
    return 0;
  }

  // Jᵀ n_i
  VectorXd project(const MatrixXd& J, int i) const {
    const Constraint& c = list_[static_cast<std::size_t>(i)];
    switch (c.kind) {
      case Constraint::row: return -(J.transpose() * p_.G.row(c.index).transpose());
      case Constraint::lower: return J.row(c.index).transpose();
      case Constraint::upper: return -J.row(c.index).transpose();
    }
    return {};
  }

  // s_i = n_iᵀz - b_i for all constraints.
  VectorXd slacks(const VectorXd& z) const {
    VectorXd s(size());
    VectorXd Gz;
    if (p_.m() > 0) Gz = p_.G * z;
    for (int i = 0; i < size(); ++i) {
      const Constraint& c = list_[static_cast<std::size_t>(i)];
      switch (c.kind) {
        case Constraint::row: s(i) = -Gz(c.index) - c.b; break;
        case Constraint::lower: s(i) = z(c.index) - c.b; break;
        case Constraint::upper: s(i) = -z(c.index) - c.b; break;
      }
    }
    return s;
  }

  // Unified diagnostic index: rows, then lower bounds, then upper bounds.
  int external_index(int i) const {
    const Constraint& c = list_[static_cast<std::size_t>(i)];
    switch (c.kind) {
      case Constraint::row: return c.index;
      case Constraint::lower: return p_.m() + c.index;
      case Constraint::upper: return p_.m() + p_.n() + c.index;
    }
    return -1;
  }

private:
  const QpProblem& p_;
  std::vector<Constraint> list_;
};

struct ActiveSetResult {
  QpStatus status = QpStatus::max_iter;
  VectorXd z;
  std::vector<int> active;
  std::vector<double> u;
  int iterations = 0;
  int worst = -1;
  double worst_violation = 0;
};

// Goldfarb–Idnani dual active-set method for strictly convex P.
class DualActiveSet {
public:
  DualActiveSet(const MatrixXd& P, const VectorXd& q, const ConstraintSet& cs)
      : n_(static_cast<int>(q.size())), cs_(cs) {
    const bool diagonal = (P - MatrixXd(P.diagonal().asDiagonal())).isZero(0.0);
    if (diagonal) {
      if ((P.diagonal().array() <= 0).any()) throw Error("qp: internal Cholesky failure");
      J_ = MatrixXd(P.diagonal().cwiseSqrt().cwiseInverse().asDiagonal());
      z_ = -q.cwiseQuotient(P.diagonal());
    } else {
      Eigen::LLT<MatrixXd> llt(P);
      if (llt.info() != Eigen::Success) throw Error("qp: internal Cholesky failure");
      const MatrixXd Linv = llt.matrixL().solve(MatrixXd::Identity(n_, n_));
      J_ = Linv.transpose();
      z_ = -llt.solve(q);
    }
    R_ = MatrixXd::Zero(n_, n_);
  }

  ActiveSetResult run(double feas_tol, int max_iter) {
    ActiveSetResult res;
    std::vector<char> is_active(static_cast<std::size_t>(cs_.size()), 0);
    VectorXd b_scale(cs_.size());
    for (int i = 0; i < cs_.size(); ++i) b_scale(i) = feas_tol * (1.0 + std::abs(cs_[i].b));

    while (true) {
      const VectorXd s = cs_.slacks(z_);
      int p = -1;
      double worst = 0;
      for (int i = 0; i < cs_.size(); ++i) {
        if (is_active[static_cast<std::size_t>(i)] || s(i) >= -b_scale(i)) continue;
        const double score = s(i) / std::max(cs_[i].norm, 1e-300);
        if (score < worst) {
          worst = score;
          p = i;
        }
      }
      if (p < 0) {
        res.status = QpStatus::optimal;
        break;
      }
      double sp = s(p);
      std::vector<double> u_plus = u_;
      u_plus.push_back(0.0);
      bool added = false;
      while (!added) {
        if (res.iterations >= max_iter) {
          res.status = QpStatus::max_iter;
          res.worst = cs_.external_index(p);
          res.worst_violation = -sp;
          u_.assign(u_plus.begin(), u_plus.end() - 1);
          finish(res);
          return res;
        }
        const VectorXd d = cs_.project(J_, p);
        const int iq = static_cast<int>(active_.size());
        VectorXd zstep = VectorXd::Zero(n_);
        if (iq < n_) zstep = J_.rightCols(n_ - iq) * d.tail(n_ - iq);
        VectorXd r;
        if (iq > 0) r = R_.topLeftCorner(iq, iq).triangularView<Eigen::Upper>().solve(d.head(iq));

        double t1 = kInf;
        int drop = -1;
        for (int k = 0; k < iq; ++k) {
          if (r(k) > 0) {
            const double ratio = u_plus[static_cast<std::size_t>(k)] / r(k);
            if (ratio < t1) {
              t1 = ratio;
              drop = k;
            }
          }
        }
        const double d2 = iq < n_ ? d.tail(n_ - iq).norm() : 0.0;
        double t2 = kInf;
        if (d2 > 1e-13 * std::max(d.norm(), 1e-300)) {
          const double curv = cs_.dot(p, zstep);
          if (curv > 0) t2 = -sp / curv;
        }
        if (!std::isfinite(t1) && !std::isfinite(t2)) {
          res.status = QpStatus::infeasible;
          res.worst = cs_.external_index(p);
          res.worst_violation = -sp;
          u_.assign(u_plus.begin(), u_plus.end() - 1);
          finish(res);
          return res;
        }
        const double t = std::min(t1, t2);
        for (int k = 0; k < iq; ++k) u_plus[static_cast<std::size_t>(k)] -= t * r(k);
        u_plus.back() += t;
        if (std::isfinite(t2)) {
          z_ += t * zstep;
          sp = cs_.dot(p, z_) - cs_[p].b;
        }
        ++res.iterations;
        if (t2 <= t1) {
          u_ = u_plus;
          add(p, d);
          is_active[static_cast<std::size_t>(p)] = 1;
          added = true;
        } else {
          is_active[static_cast<std::size_t>(active_[static_cast<std::size_t>(drop)])] = 0;
          u_plus.erase(u_plus.begin() + drop);
          remove(drop);
        }
      }
      if (res.iterations >= max_iter) {
        // Only report exhaustion when the iterate is still infeasible.
        const VectorXd s2 = cs_.slacks(z_);
        bool feasible = true;
        for (int i = 0; i < cs_.size(); ++i)
          if (!is_active[static_cast<std::size_t>(i)] && s2(i) < -b_scale(i)) feasible = false;
        res.status = feasible ? QpStatus::optimal : QpStatus::max_iter;
        break;
      }
    }
    finish(res);
    return res;
  }

private:
  void finish(ActiveSetResult& res) const {
    res.z = z_;
    res.active = active_;
    res.u = u_;
  }

  void rotate_columns(MatrixXd& M, int a, int b, double c, double s) {
    const VectorXd ca = M.col(a);
    M.col(a) = c * ca + s * M.col(b);
    M.col(b) = -s * ca + c * M.col(b);
  }

  void add(int p, VectorXd d) {
    const int iq = static_cast<int>(active_.size());
    for (int j = n_ - 1; j > iq; --j) {
      const double a = d(j - 1), b = d(j);
      if (b == 0.0) continue;
      const double h = std::hypot(a, b);
      const double c = a / h, s = b / h;
      d(j - 1) = h;
      d(j) = 0.0;
      rotate_columns(J_, j - 1, j, c, s);
    }
    R_.col(iq).head(iq + 1) = d.head(iq + 1);
    active_.push_back(p);
  }

  void remove(int l) {
    const int iq = static_cast<int>(active_.size());
    for (int c = l; c < iq - 1; ++c) R_.col(c).head(iq) = R_.col(c + 1).head(iq);
    R_.col(iq - 1).setZero();
    for (int j = l; j < iq - 1; ++j) {
      const double a = R_(j, j), b = R_(j + 1, j);
      if (b == 0.0) continue;
      const double h = std::hypot(a, b);
      const double c = a / h, s = b / h;
      for (int k = j; k < iq - 1; ++k) {
        const double x = R_(j, k), y = R_(j + 1, k);
        R_(j, k) = c * x + s * y;
        R_(j + 1, k) = -s * x + c * y;
      }
      R_(j + 1, j) = 0.0;
      rotate_columns(J_, j, j + 1, c, s);
    }
    active_.erase(active_.begin() + l);
  }

  int n_;
  const ConstraintSet& cs_;
  MatrixXd J_;
  MatrixXd R_;
  VectorXd z_;
  std::vector<int> active_;
  std::vector<double> u_;
};

struct Multipliers {
  VectorXd y, y_lower, y_upper;
};

Multipliers unpack(const QpProblem& p, const ConstraintSet& cs, const std::vector<int>& active,
                   const std::vector<double>& u) {
  Multipliers m{VectorXd::Zero(p.m()), VectorXd::Zero(p.n()), VectorXd::Zero(p.n())};
  for (std::size_t k = 0; k < active.size(); ++k) {
    const Constraint& c = cs[active[k]];
    switch (c.kind) {
      case Constraint::row: m.y(c.index) += u[k]; break;
      case Constraint::lower: m.y_lower(c.index) += u[k]; break;
      case Constraint::upper: m.y_upper(c.index) += u[k]; break;
    }
  }
  return m;
}

double inf_norm(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

// Lawson–Hanson non-negative least squares: min ‖M x - b‖ subject to x ≥ 0.
VectorXd nnls(const MatrixXd& M, const VectorXd& b) {
  const int k = static_cast<int>(M.cols());
  VectorXd x = VectorXd::Zero(k);
  if (k == 0) return x;
  std::vector<char> passive(static_cast<std::size_t>(k), 0);
  const double tol = 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff()) * std::max(1.0, inf_norm(b)) * k;
  for (int outer = 0; outer < 3 * k + 10; ++outer) {
    const VectorXd w = M.transpose() * (b - M * x);
    int j = -1;
    double best = tol;
    for (int i = 0; i < k; ++i)
      if (!passive[static_cast<std::size_t>(i)] && w(i) > best) {
        best = w(i);
        j = i;
      }
    if (j < 0) break;
    passive[static_cast<std::size_t>(j)] = 1;
    for (int inner = 0; inner < 3 * k + 10; ++inner) {
      std::vector<int> idx;
      for (int i = 0; i < k; ++i)
        if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
      MatrixXd Mp(M.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t c = 0; c < idx.size(); ++c) Mp.col(static_cast<Eigen::Index>(c)) = M.col(idx[c]);
      const VectorXd sp = Mp.colPivHouseholderQr().solve(b);
      bool positive = true;
      for (Eigen::Index c = 0; c < sp.size(); ++c)
        if (sp(c) <= 0) positive = false;
      if (positive) {
        x.setZero();
        for (std::size_t c = 0; c < idx.size(); ++c) x(idx[c]) = sp(static_cast<Eigen::Index>(c));
        break;
      }
      double alpha = 1.0;
      for (std::size_t c = 0; c < idx.size(); ++c) {
        const double s = sp(static_cast<Eigen::Index>(c));
        const double xi = x(idx[c]);
        if (s <= 0 && xi - s > 0) alpha = std::min(alpha, xi / (xi - s));
      }
      for (std::size_t c = 0; c < idx.size(); ++c) {
        const double s = sp(static_cast<Eigen::Index>(c));
        x(idx[c]) += alpha * (s - x(idx[c]));
        if (x(idx[c]) <= 1e-15) {
          x(idx[c]) = 0.0;
          passive[static_cast<std::size_t>(idx[c])] = 0;
        }
      }
    }
  }
  return x;
}

QpSolution make_solution(const QpProblem& p, const ConstraintSet& cs, const ActiveSetResult& r) {
  QpSolution sol;
  sol.z = r.z;
  sol.iterations = r.iterations;
  sol.status = r.status;
  const Multipliers m = unpack(p, cs, r.active, r.u);
  sol.y = m.y;
  sol.y_lower = m.y_lower;
  sol.y_upper = m.y_upper;
  sol.objective = p.objective(sol.z);
  sol.kkt_residual = kkt_residual(p, sol.z, sol.y, sol.y_lower, sol.y_upper);
  if (r.worst >= 0) {
    sol.worst_constraint = r.worst;
    sol.worst_violation = r.worst_violation;
  }
  return sol;
}

// Solves the equality-constrained KKT system of the active set reported by the active-set
// iteration. Recovers an exact minimizer when the proximal iterates creep along a face.
std::optional<QpSolution> polish(const QpProblem& p, const ConstraintSet& cs, const ActiveSetResult& r) {
  const int n = p.n();
  const int k = static_cast<int>(r.active.size());
  MatrixXd K = MatrixXd::Zero(n + k, n + k);
  VectorXd rhs(n + k);
  K.topLeftCorner(n, n) = p.P;
  rhs.head(n) = -p.q;
  for (int c = 0; c < k; ++c) {
    VectorXd e = VectorXd::Zero(n);
    const Constraint& con = cs[r.active[static_cast<std::size_t>(c)]];
    switch (con.kind) {
      case Constraint::row: e = -p.G.row(con.index).transpose(); break;
      case Constraint::lower: e(con.index) = 1.0; break;
      case Constraint::upper: e(con.index) = -1.0; break;
    }
    K.block(0, n + c, n, 1) = -e;
    K.block(n + c, 0, 1, n) = e.transpose();
    rhs(n + c) = con.b;
  }
  const VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);
  if (!sol.allFinite()) return std::nullopt;
  ActiveSetResult pr = r;
  pr.z = sol.head(n);
  for (int c = 0; c < k; ++c) {
    pr.u[static_cast<std::size_t>(c)] = sol(n + c);
    if (sol(n + c) < 0) return std::nullopt;
  }
  return make_solution(p, cs, pr);
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

QpSolution finalize(const QpProblem& p, QpSolution sol, double tol);
QpSolution solve_with(const QpProblem& p, const ConstraintSet& cs, double tol, int max_iter);

}  // namespace

QpProblem QpProblem::unconstrained(const MatrixXd& P, const VectorXd& q) {
  QpProblem p;
  p.P = P;
  p.q = q;
  p.G = MatrixXd::Zero(0, q.size());
  p.h = VectorXd::Zero(0);
  p.lb = VectorXd::Constant(q.size(), -kInf);
  p.ub = VectorXd::Constant(q.size(), kInf);
  return p;
}

void QpProblem::validate() const {
  const auto n = q.size();
  if (P.rows() != n || P.cols() != n) throw Error("qp: P must be n x n with n = size of q");
  if (G.cols() != n || G.rows() != h.size()) throw Error("qp: G must be m x n with m = size of h");
  if (lb.size() != n || ub.size() != n) throw Error("qp: bounds must have n entries");
  if (!P.allFinite() || !q.allFinite() || !G.allFinite() || h.hasNaN())
    throw Error("qp: problem data must be finite");
  if (lb.hasNaN() || ub.hasNaN()) throw Error("qp: bounds must not be NaN");
  if (n > 0 && (P - P.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, P.cwiseAbs().maxCoeff()))
    throw Error("qp: P must be symmetric");
}

double QpProblem::objective(const VectorXd& z) const { return 0.5 * z.dot(P * z) + q.dot(z); }

std::string to_string(QpStatus s) {
  switch (s) {
    case QpStatus::optimal: return "optimal";
    case QpStatus::max_iter: return "max_iter";
    case QpStatus::infeasible: return "infeasible";
  }
  return "unknown";
}

double KktBreakdown::max() const { return std::max({primal, dual, stationarity, complementarity}); }

KktBreakdown kkt_breakdown(const QpProblem& p, const VectorXd& z, const VectorXd& y, const VectorXd& y_lower,
                           const VectorXd& y_upper) {
  KktBreakdown k;
  const VectorXd Pz = p.P * z;
  VectorXd Gty = VectorXd::Zero(p.n());
  if (p.m() > 0) Gty = p.G.transpose() * y;
  const VectorXd r = Pz + p.q + Gty - y_lower + y_upper;
  const double scale =
      1.0 + std::max({inf_norm(Pz), inf_norm(p.q), inf_norm(Gty), inf_norm(y_lower), inf_norm(y_upper)});
  k.stationarity = inf_norm(r) / scale;

  auto check = [&](double slack, double bnd, double mult) {
    // slack ≥ 0 when feasible
    k.primal = std::max(k.primal, std::max(0.0, -slack) / (1.0 + std::abs(bnd)));
    k.dual = std::max(k.dual, std::max(0.0, -mult) / scale);
    k.complementarity =
        std::max(k.complementarity, std::min(std::abs(mult) / scale, std::abs(slack) / (1.0 + std::abs(bnd))));
  };
  if (p.m() > 0) {
    const VectorXd Gz = p.G * z;
    for (int i = 0; i < p.m(); ++i) check(p.h(i) - Gz(i), p.h(i), y(i));
  }
  for (int j = 0; j < p.n(); ++j) {
    if (std::isfinite(p.lb(j))) check(z(j) - p.lb(j), p.lb(j), y_lower(j));
    else k.dual = std::max(k.dual, std::abs(y_lower(j)) / scale);
    if (std::isfinite(p.ub(j))) check(p.ub(j) - z(j), p.ub(j), y_upper(j));
    else k.dual = std::max(k.dual, std::abs(y_upper(j)) / scale);
  }
  return k;
}

double kkt_residual(const QpProblem& p, const VectorXd& z, const VectorXd& y, const VectorXd& y_lower,
                    const VectorXd& y_upper) {
  return kkt_breakdown(p, z, y, y_lower, y_upper).max();
}

double kkt_residual(const QpProblem& p, const VectorXd& z) {
  p.validate();
  if (z.size() != p.n()) throw Error("kkt_residual: z has the wrong dimension");
  const ConstraintSet cs(p);
  const VectorXd s = cs.slacks(z);
  std::vector<int> near;
  for (int i = 0; i < cs.size(); ++i)
    if (s(i) <= 1e-8 * (1.0 + std::abs(cs[i].b))) near.push_back(i);
  MatrixXd M(p.n(), static_cast<Eigen::Index>(near.size()));
  for (std::size_t c = 0; c < near.size(); ++c) {
    VectorXd e = VectorXd::Zero(p.n());
    const Constraint& con = cs[near[c]];
    switch (con.kind) {
      case Constraint::row: e = -p.G.row(con.index).transpose(); break;
      case Constraint::lower: e(con.index) = 1.0; break;
      case Constraint::upper: e(con.index) = -1.0; break;
    }
    M.col(static_cast<Eigen::Index>(c)) = e;
  }
  const VectorXd grad = p.P * z + p.q;
  const VectorXd u = nnls(M, grad);
  const Multipliers m = unpack(p, cs, near, std::vector<double>(u.data(), u.data() + u.size()));
  return kkt_residual(p, z, m.y, m.y_lower, m.y_upper);
}

QpSolution solve(const QpProblem& p, double tol, int max_iter) {
  p.validate();
  if (!(tol > 0)) throw Error("qp: tolerance must be positive");
  const int n = p.n();
  for (int j = 0; j < n; ++j) {
    if (p.lb(j) > p.ub(j)) {
      QpSolution sol;
      sol.z = VectorXd::Zero(n);
      sol.status = QpStatus::infeasible;
      sol.worst_constraint = p.m() + j;
      sol.worst_violation = p.lb(j) - p.ub(j);
      sol.y = VectorXd::Zero(p.m());
      sol.y_lower = sol.y_upper = VectorXd::Zero(n);
      sol.diagnostic = "empty box: " + describe_constraint(p, p.m() + j);
      return sol;
    }
  }
  const ConstraintSet cs(p);
  QpSolution sol = solve_with(p, cs, tol, max_iter);
  if (sol.status == QpStatus::infeasible && sol.worst_constraint && sol.worst_violation <= 1e-5) {
    // Degenerate active sets can strand a rounding-level violation; retry on a slightly
    // loosened copy whose solution still meets the original constraints within tolerance.
    for (double eps : {0.1 * tol, 0.5 * tol}) {
      QpSolution retry = solve_with(p, cs.relaxed(eps), tol, max_iter);
      retry.iterations += sol.iterations;
      if (retry.status != QpStatus::infeasible) {
        sol = retry;
        break;
      }
    }
  }
  return finalize(p, sol, tol);
}

namespace {

QpSolution solve_with(const QpProblem& p, const ConstraintSet& cs, double tol, int max_iter) {
  const int n = p.n();
  const double feas_tol = 1e-2 * tol;

  bool definite = false;
  const bool diagonal = (p.P - MatrixXd(p.P.diagonal().asDiagonal())).isZero(0.0);
  if (diagonal) {
    definite = n == 0 || (p.P.diagonal().minCoeff() > 1e-8 &&
                          p.P.diagonal().minCoeff() > 1e-12 * p.P.diagonal().maxCoeff());
  } else {
    // Curvature below 1e-8 is treated as singular and handled by the proximal loop.
    Eigen::LLT<MatrixXd> llt(p.P);
    definite = llt.info() == Eigen::Success && llt.rcond() > 1e-12 &&
               llt.rcond() * p.P.diagonal().maxCoeff() > 1e-8;
  }

  QpSolution sol;
  VectorXd z0 = VectorXd::Zero(n);
  int used = 0;
  if (definite) {
    DualActiveSet gi(p.P, p.q, cs);
    sol = make_solution(p, cs, gi.run(feas_tol, max_iter));
    if (sol.status != QpStatus::optimal || sol.kkt_residual <= tol) return sol;
    // Ill-conditioned factorization: polish with the proximal loop from the current iterate.
    z0 = sol.z;
    used = sol.iterations;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(p.P);
  const double scale = std::max(1.0, p.P.cwiseAbs().maxCoeff());
  if (n > 0 && es.eigenvalues().minCoeff() < -1e-8 * scale) {
    std::ostringstream msg;
    msg << "qp: P is not positive semidefinite (minimum eigenvalue " << es.eigenvalues().minCoeff() << ")";
    throw Error(msg.str());
  }
  const VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  MatrixXd Pc = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  Pc = 0.5 * (Pc + Pc.transpose());
  QpProblem clamped = p;
  clamped.P = Pc;
  // Proximal point: each subproblem adds ρ/2‖z - z_k‖², making it strictly convex.
  const double rho = 1e-3 * scale;
  const MatrixXd Prox = Pc + rho * MatrixXd::Identity(n, n);
  VectorXd zk = z0;
  int total = used;
  QpSolution best;
  bool have_best = false;
  sol.status = QpStatus::max_iter;
  while (total < max_iter) {
    const VectorXd qk = p.q - rho * zk;
    DualActiveSet gi(Prox, qk, cs);
    ActiveSetResult r = gi.run(feas_tol, max_iter - total);
    total += std::max(r.iterations, 1);
    r.iterations = total;
    sol = make_solution(clamped, cs, r);
    if (r.status != QpStatus::optimal) {
      if (have_best) sol = best;
      break;
    }
    if (sol.kkt_residual <= 0.1 * tol) break;
    if (auto pol = polish(clamped, cs, r); pol && pol->kkt_residual < sol.kkt_residual) {
      pol->iterations = total;
      sol = *pol;
      if (sol.kkt_residual <= 0.1 * tol) break;
    }
    if (!have_best || sol.kkt_residual < best.kkt_residual) {
      best = sol;
      have_best = true;
    }
    if ((r.z - zk).lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + r.z.lpNorm<Eigen::Infinity>())) break;
    zk = r.z;
    sol.status = QpStatus::max_iter;
  }
  if (sol.status == QpStatus::max_iter && have_best && best.kkt_residual < sol.kkt_residual) {
    best.status = QpStatus::max_iter;
    sol = best;
  }
  return sol;
}

QpSolution finalize(const QpProblem& p, QpSolution sol, double tol) {
  if (sol.status == QpStatus::optimal && !(sol.kkt_residual <= tol)) {
    sol.status = QpStatus::max_iter;
    std::ostringstream msg;
    msg << "active-set iteration stopped with KKT residual " << sol.kkt_residual << " above tolerance " << tol;
    sol.diagnostic = msg.str();
  }
  if (sol.status == QpStatus::infeasible && sol.worst_constraint) {
    std::ostringstream msg;
    msg << "infeasible: cannot satisfy " << describe_constraint(p, *sol.worst_constraint) << " (violation "
        << sol.worst_violation << ")";
    sol.diagnostic = msg.str();
  } else if (sol.status == QpStatus::max_iter && sol.diagnostic.empty()) {
    sol.diagnostic = "iteration limit reached";
  }
  return sol;
}

}  // namespace

std::string describe_constraint(const QpProblem& p, int index) {
  std::ostringstream os;
  if (index < p.m()) os << "row " << index << " of G z <= h";
  else if (index < p.m() + p.n()) os << "lower bound on z[" << index - p.m() << "]";
  else os << "upper bound on z[" << index - p.m() - p.n() << "]";
  return os.str();
}

void write_problem(std::ostream& os, const QpProblem& p) {
  auto block = [&](const std::string& name, const MatrixXd& M) {
    os << "# " << name << ' ' << M.rows() << ' ' << M.cols() << '\n';
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? "," : "") << format_double(M(i, j));
      os << '\n';
    }
  };
  block("P", p.P);
  block("q", p.q.transpose());
  block("G", p.G);
  block("h", p.h.transpose());
  block("lb", p.lb.transpose());
  block("ub", p.ub.transpose());
}

QpProblem read_problem(std::istream& is) {
  auto read_block = [&](const std::string& expected) {
    std::string line;
    while (std::getline(is, line) && line.empty()) {
    }
    std::istringstream hdr(line);
    std::string hash, name;
    Eigen::Index rows = 0, cols = 0;
    if (!(hdr >> hash >> name >> rows >> cols) || hash != "#" || name != expected)
      throw Error("read_problem: expected block '" + expected + "'");
    MatrixXd M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (!std::getline(is, line)) throw Error("read_problem: truncated block '" + expected + "'");
      std::istringstream ls(line);
      std::string cell;
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (!std::getline(ls, cell, ',')) throw Error("read_problem: short row in block '" + expected + "'");
        if (cell == "inf") M(i, j) = kInf;
        else if (cell == "-inf") M(i, j) = -kInf;
        else M(i, j) = std::stod(cell);
      }
    }
    return M;
  };
  QpProblem p;
  p.P = read_block("P");
  p.q = read_block("q").transpose();
  p.G = read_block("G");
  p.h = read_block("h").transpose();
  p.lb = read_block("lb").transpose();
  p.ub = read_block("ub").transpose();
  p.validate();
  return p;
}

}  // namespace fcw
