#pragma once

// Dense convex QP solver (Goldfarb-Idnani dual active-set method).
//
//   minimize    0.5 x'Hx + c'x + constant
//   subject to  A_eq x  = b_eq
//               A_ge x >= b_ge
//               lo <= x <= hi          (entries may be infinite)
//
// H must be positive semidefinite. Variables with no curvature are handled by
// a proximal-point outer loop, so linear programs are accepted as well.

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace acrp {

struct QpProblem {
  Eigen::MatrixXd H;
  Eigen::VectorXd c;
  double constant = 0.0;
  Eigen::MatrixXd A_eq;
  Eigen::VectorXd b_eq;
  Eigen::MatrixXd A_ge;
  Eigen::VectorXd b_ge;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  /// Empty problem with n variables, unbounded, zero objective.
  static QpProblem with_size(Eigen::Index n);
  Eigen::Index size() const { return H.rows(); }
  double objective(const Eigen::VectorXd& x) const;
};

enum class QpStatus { Optimal, Infeasible, MaxIterations };

const char* to_string(QpStatus s);

struct QpOptions {
  int max_iterations = 20000;
  /// Feasibility tolerance on unit-normalised rows.
  double feasibility_tol = 1e-11;
  /// Proximal weight relative to the largest Hessian diagonal entry.
  double prox_weight = 1e-4;
  int max_prox_iterations = 400;
  /// Inequality rows (indices into A_ge) to try first when several are
  /// violated, typically the active set of a parent problem.
  std::vector<int> warm_active;
};

struct QpResult {
  QpStatus status = QpStatus::MaxIterations;
  Eigen::VectorXd x;
  double objective = 0.0;
  /// Multipliers in the sign convention  H x + c = A_eq' y_eq + A_ge' y_ge +
  /// y_lo - y_hi,  with y_ge, y_lo, y_hi >= 0.
  Eigen::VectorXd y_eq;
  Eigen::VectorXd y_ge;
  Eigen::VectorXd y_lo;
  Eigen::VectorXd y_hi;
  std::vector<int> active_ge;
  /// When infeasible: the constraint that could not be added, as text
  /// ("ge 3", "eq 0", "lo 2", "hi 5").
  std::string witness;
  int iterations = 0;
};

QpResult solve_qp(const QpProblem& qp, const QpOptions& opts = {});

struct KktResiduals {
  double stationarity = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;

  double max() const;
};

/// Residuals of the KKT conditions at a result (relative to row norms).
KktResiduals kkt_residuals(const QpProblem& qp, const QpResult& r);

}  // namespace acrp
