#pragma once

#include <iosfwd>
#include <vector>

#include "legmpc/types.hpp"

namespace legmpc {

/// minimize 0.5 x'Hx + f'x  subject to  A_eq x = b_eq,  A_in x >= b_in.
struct QpProblem {
  MatX H;
  VecX f;
  MatX A_eq;
  VecX b_eq;
  MatX A_in;
  VecX b_in;

  int dim() const { return static_cast<int>(H.rows()); }
  int num_eq() const { return static_cast<int>(A_eq.rows()); }
  int num_in() const { return static_cast<int>(A_in.rows()); }

  /// Empty constraint blocks get the right column count. Throws
  /// std::invalid_argument on inconsistent shapes or an asymmetric H.
  void normalize();
  double objective(const VecX& x) const { return 0.5 * x.dot(H * x) + f.dot(x); }
};

enum class QpStatus { Optimal, Infeasible, DegenerateEqualities, IterationLimit };

const char* to_string(QpStatus s);

struct QpSolution {
  QpStatus status = QpStatus::Infeasible;
  VecX x;
  double objective = 0.0;
  std::vector<int> active_set;  // indices of active inequality rows
  VecX lambda_eq;               // H x + f = A_eq' lambda_eq + A_in' mu_in
  VecX mu_in;                   // zero for inactive rows
  int iterations = 0;
  double regularization = 0.0;  // added to the diagonal of H, 0 if none

  bool ok() const { return status == QpStatus::Optimal; }
};

struct QpOptions {
  double tol = 1e-8;
  double min_eigenvalue = 1e-10;  // below this H gets min_eigenvalue * I added
};

/// Goldfarb-Idnani dual active-set method. No warm start.
QpSolution solve_qp(const QpProblem& problem, const QpOptions& options = {});

/// Eliminates variables fixed by single-entry equality rows, solves the
/// reduced problem with solve_qp and recovers all multipliers.
QpSolution solve_qp_presolved(const QpProblem& problem, const QpOptions& options = {});

struct KktResiduals {
  double stationarity = 0.0;
  double primal_eq = 0.0;
  double primal_in = 0.0;        // max violation of A_in x >= b_in
  double dual = 0.0;             // max(-mu)
  double complementarity = 0.0;  // max |mu_i * slack_i|

  double max() const;
};

KktResiduals kkt_residuals(const QpProblem& problem, const QpSolution& solution);

/// Plain-text dump of all problem matrices for debugging.
void write_problem(std::ostream& os, const QpProblem& problem);

}  // namespace legmpc
