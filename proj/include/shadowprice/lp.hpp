#pragma once

#include <Eigen/Dense>

namespace shadowprice {

/// maximize c'x  subject to  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0.
/// Empty matrices (0 rows) are allowed for either constraint block.
struct LinearProgram {
  Eigen::MatrixXd a_ub;
  Eigen::VectorXd b_ub;
  Eigen::MatrixXd a_eq;
  Eigen::VectorXd b_eq;
  Eigen::VectorXd c;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Eigen::VectorXd x;
  double value = 0.0;
  int pivots = 0;
};

/// Dense two-phase simplex with Bland's rule. Intended for the small feasibility
/// programs that arise on scenario trees (a few hundred rows at most).
LpResult solve_lp(const LinearProgram& lp, double tol = 1e-10);

}  // namespace shadowprice
