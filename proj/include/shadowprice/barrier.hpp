#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace shadowprice {

/// Smooth convex objective. Returns false when x lies outside its domain.
/// `grad` and `hess` may be null when only the value is needed.
using ConvexObjective =
    std::function<bool(const Eigen::VectorXd& x, double& value, Eigen::VectorXd* grad,
                       Eigen::MatrixXd* hess)>;

struct BarrierOptions {
  double tol_gap = 1e-9;       // stop once m / t <= tol_gap
  double tol_newton = 1e-10;   // centering stops at decrement^2 / 2 <= tol_newton
  int max_newton = 200;        // per centering step
  double t0 = 1.0;
  double growth = 10.0;
};

enum class BarrierStatus { converged, max_iter, stalled };

struct BarrierResult {
  BarrierStatus status = BarrierStatus::converged;
  Eigen::VectorXd x;
  double value = 0.0;          // f(x)
  double gap_bound = 0.0;      // m / t at exit
  double decrement = 0.0;      // last Newton decrement
  int newton_iterations = 0;
  int fallback_steps = 0;      // steps taken with a regularized / gradient direction
  Eigen::VectorXd multipliers; // 1 / (t * slack) per inequality row
  std::string message;
};

/// Log-barrier interior method for  minimize f(x)  s.t.  G x <= h.
/// x0 must satisfy G x0 < h strictly and lie in the domain of f.
BarrierResult barrier_minimize(const ConvexObjective& f, const Eigen::MatrixXd& g,
                               const Eigen::VectorXd& h, const Eigen::VectorXd& x0,
                               const BarrierOptions& options);

}  // namespace shadowprice
