#include "shadowprice/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shadowprice/errors.hpp"

namespace shadowprice {

namespace {

struct Centered {
  double value;
  Eigen::VectorXd slack;
};

// t f(x) - sum log(h - G x); returns false outside the domain.
bool barrier_value(const ConvexObjective& f, const Eigen::MatrixXd& g, const Eigen::VectorXd& h,
                   const Eigen::VectorXd& x, double t, Centered& out) {
  out.slack = h - g * x;
  if (out.slack.size() > 0 && out.slack.minCoeff() <= 0.0) return false;
  double fx = 0.0;
  if (!f(x, fx, nullptr, nullptr) || !std::isfinite(fx)) return false;
  out.value = t * fx - out.slack.array().log().sum();
  return true;
}

// Newton direction with Jacobi scaling; regularizes when the factorization is not positive.
Eigen::VectorXd newton_direction(const Eigen::MatrixXd& hess, const Eigen::VectorXd& grad,
                                 bool& used_fallback) {
  const auto n = grad.size();
  Eigen::VectorXd d(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double hjj = hess(j, j);
    d(j) = hjj > 0.0 && std::isfinite(hjj) ? 1.0 / std::sqrt(hjj) : 1.0;
  }
  Eigen::MatrixXd scaled = d.asDiagonal() * hess * d.asDiagonal();
  const Eigen::VectorXd rhs = -(d.asDiagonal() * grad);
  used_fallback = false;
  double shift = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::MatrixXd m = scaled;
    if (shift > 0.0) m.diagonal().array() += shift;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
      Eigen::VectorXd y = ldlt.solve(rhs);
      if (y.allFinite() && rhs.dot(y) > 0.0) {
        used_fallback = shift > 0.0;
        return d.asDiagonal() * y;
      }
    }
    shift = shift == 0.0 ? 1e-12 : shift * 100.0;
  }
  used_fallback = true;
  return d.asDiagonal() * rhs;
}

}  // namespace

BarrierResult barrier_minimize(const ConvexObjective& f, const Eigen::MatrixXd& g,
                               const Eigen::VectorXd& h, const Eigen::VectorXd& x0,
                               const BarrierOptions& options) {
  if (g.rows() != h.size() || (g.rows() > 0 && g.cols() != x0.size())) {
    throw StructuralError("barrier problem dimensions do not match");
  }
  const auto m = static_cast<double>(g.rows());
  const auto n = x0.size();

  BarrierResult result;
  result.x = x0;
  double t = options.t0;
  Centered cur;
  if (!barrier_value(f, g, h, x0, t, cur)) {
    throw DomainError("barrier start point is not strictly feasible");
  }

  Eigen::VectorXd fgrad(n);
  Eigen::MatrixXd fhess(n, n);
  for (int outer = 0; outer < 200; ++outer) {
    if (!barrier_value(f, g, h, result.x, t, cur)) {
      throw DomainError("barrier iterate left the feasible region");
    }
    int iters = 0;
    bool centered = false;
    while (iters < options.max_newton) {
      double fx = 0.0;
      f(result.x, fx, &fgrad, &fhess);
      const Eigen::VectorXd inv = cur.slack.cwiseInverse();
      Eigen::VectorXd grad = t * fgrad;
      Eigen::MatrixXd hess = t * fhess;
      if (g.rows() > 0) {
        grad += g.transpose() * inv;
        hess += g.transpose() * inv.cwiseAbs2().asDiagonal() * g;
      }
      bool fallback = false;
      const Eigen::VectorXd dx = newton_direction(hess, grad, fallback);
      if (fallback) ++result.fallback_steps;
      const double dec2 = -grad.dot(dx);
      result.decrement = std::sqrt(std::max(dec2, 0.0));
      ++iters;
      ++result.newton_iterations;
      // below the rounding level of the barrier value further steps are noise
      const double noise = 1e-14 * (1.0 + std::abs(cur.value));
      if (dec2 / 2.0 <= std::max(options.tol_newton, noise)) {
        centered = true;
        break;
      }
      // largest step keeping slacks positive
      double alpha = 1.0;
      if (g.rows() > 0) {
        const Eigen::VectorXd gd = g * dx;
        for (Eigen::Index i = 0; i < gd.size(); ++i) {
          if (gd(i) > 0.0) alpha = std::min(alpha, 0.99 * cur.slack(i) / gd(i));
        }
      }
      Centered next;
      bool accepted = false;
      while (alpha > 1e-18) {
        const Eigen::VectorXd trial = result.x + alpha * dx;
        if (barrier_value(f, g, h, trial, t, next) && next.value < cur.value &&
            next.value <= cur.value - 0.25 * alpha * dec2) {
          result.x = trial;
          cur = std::move(next);
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        // no further progress at working precision
        centered = true;
        break;
      }
    }
    if (!centered) {
      result.status = BarrierStatus::max_iter;
      result.message = "Newton iteration limit reached during centering";
      break;
    }
    if (m == 0.0 || m / t <= options.tol_gap) break;
    t *= options.growth;
  }

  double fx = 0.0;
  f(result.x, fx, nullptr, nullptr);
  result.value = fx;
  result.gap_bound = m / t;
  const Eigen::VectorXd slack = h - g * result.x;
  result.multipliers = (t * slack).cwiseInverse();
  return result;
}

}  // namespace shadowprice
