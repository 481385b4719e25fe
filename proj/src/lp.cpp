#include "shadowprice/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "shadowprice/errors.hpp"

namespace shadowprice {

namespace {

constexpr double kPivotTol = 1e-9;

class Tableau {
 public:
  Tableau(Eigen::MatrixXd t, std::vector<int> basis, double tol)
      : t_(std::move(t)), basis_(std::move(basis)), tol_(tol) {}

  Eigen::MatrixXd& data() { return t_; }
  std::vector<int>& basis() { return basis_; }
  int rows() const { return static_cast<int>(t_.rows()) - 1; }
  int cols() const { return static_cast<int>(t_.cols()) - 1; }
  int pivots() const { return pivots_; }

  /// Objective row = sum_i c_B(i) row_i - c. Maximization: optimal when all >= -tol.
  void set_objective(const Eigen::VectorXd& c) {
    const int m = rows();
    auto obj = t_.row(m);
    obj.setZero();
    obj.head(cols()) = -c.transpose();
    for (int i = 0; i < m; ++i) {
      const double cb = c(basis_[static_cast<std::size_t>(i)]);
      if (cb != 0.0) obj += cb * t_.row(i);
    }
  }

  /// Returns false when unbounded. Dantzig pricing, switching to Bland's rule
  /// after a run of degenerate pivots to rule out cycling.
  bool optimize(const std::vector<bool>& allowed) {
    const int m = rows();
    const int n = cols();
    int degenerate_run = 0;
    for (int iter = 0; iter < 50000; ++iter) {
      const bool bland = degenerate_run > 30;
      int enter = -1;
      double most = -tol_;
      for (int j = 0; j < n; ++j) {
        if (!allowed[static_cast<std::size_t>(j)] || t_(m, j) >= -tol_) continue;
        if (bland) {
          enter = j;
          break;
        }
        if (t_(m, j) < most) {
          most = t_(m, j);
          enter = j;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        const double a = t_(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = std::max(t_(i, n), 0.0) / a;
        const bool tie = leave >= 0 && std::abs(ratio - best) <= tol_;
        bool better = !tie && ratio < best;
        if (tie) {
          // Bland's tie-break when guarding against cycling, else the larger pivot
          better = bland ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]
                         : a > t_(leave, enter);
        }
        if (better) {
          best = std::min(best, ratio);
          leave = i;
        }
      }
      if (leave < 0) return false;
      degenerate_run = best <= tol_ ? degenerate_run + 1 : 0;
      pivot(leave, enter);
    }
    throw std::runtime_error("simplex iteration limit reached");
  }

  void pivot(int r, int c) {
    ++pivots_;
    t_.row(r) /= t_(r, c);
    for (int i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) {
        t_.row(i) -= f * t_.row(r);
        t_(i, c) = 0.0;
      }
    }
    t_ = t_.unaryExpr([](double v) { return std::abs(v) < 1e-14 ? 0.0 : v; });
    basis_[static_cast<std::size_t>(r)] = c;
  }

 private:
  Eigen::MatrixXd t_;
  std::vector<int> basis_;
  double tol_;
  int pivots_ = 0;
};

}  // namespace

LpResult solve_lp(const LinearProgram& lp, double tol) {
  const int n = static_cast<int>(lp.c.size());
  const int m_ub = static_cast<int>(lp.a_ub.rows());
  const int m_eq = static_cast<int>(lp.a_eq.rows());
  if ((m_ub > 0 && lp.a_ub.cols() != n) || (m_eq > 0 && lp.a_eq.cols() != n) ||
      lp.b_ub.size() != m_ub || lp.b_eq.size() != m_eq) {
    throw StructuralError("linear program dimensions do not match");
  }
  const int m = m_ub + m_eq;

  // columns: [x (n) | slacks (m_ub) | artificials (m)] + rhs
  const int n_slack = m_ub;
  const int art0 = n + n_slack;
  const int total = art0 + m;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, total + 1);
  std::vector<int> basis(static_cast<std::size_t>(m));
  std::vector<bool> is_artificial_basis(static_cast<std::size_t>(m), false);

  for (int i = 0; i < m_ub; ++i) {
    double sign = lp.b_ub(i) < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * lp.a_ub.row(i);
    t(i, n + i) = sign;
    t(i, total) = sign * lp.b_ub(i);
    if (sign > 0.0) {
      basis[static_cast<std::size_t>(i)] = n + i;
    } else {
      t(i, art0 + i) = 1.0;
      basis[static_cast<std::size_t>(i)] = art0 + i;
      is_artificial_basis[static_cast<std::size_t>(i)] = true;
    }
  }
  for (int k = 0; k < m_eq; ++k) {
    const int i = m_ub + k;
    double sign = lp.b_eq(k) < 0.0 ? -1.0 : 1.0;
    t.row(i).head(n) = sign * lp.a_eq.row(k);
    t(i, total) = sign * lp.b_eq(k);
    t(i, art0 + i) = 1.0;
    basis[static_cast<std::size_t>(i)] = art0 + i;
    is_artificial_basis[static_cast<std::size_t>(i)] = true;
  }

  const Eigen::MatrixXd original = t;
  Tableau tab(std::move(t), std::move(basis), tol);
  std::vector<bool> allowed(static_cast<std::size_t>(total), true);

  // phase 1: maximize -sum(artificials)
  Eigen::VectorXd c1 = Eigen::VectorXd::Zero(total);
  bool any_artificial = false;
  for (int i = 0; i < m; ++i) {
    if (is_artificial_basis[static_cast<std::size_t>(i)]) {
      c1(art0 + i) = -1.0;
      any_artificial = true;
    }
  }
  // unused artificial columns never enter
  for (int i = 0; i < m; ++i) {
    if (!is_artificial_basis[static_cast<std::size_t>(i)]) allowed[static_cast<std::size_t>(art0 + i)] = false;
  }

  LpResult result;
  if (any_artificial) {
    tab.set_objective(c1);
    tab.optimize(allowed);
    const double infeas = -tab.data()(m, total);
    const double scale = 1.0 + tab.data().col(total).head(m).cwiseAbs().maxCoeff();
    if (infeas > 1e3 * tol * scale) {
      result.status = LpStatus::infeasible;
      result.pivots = tab.pivots();
      return result;
    }
    // drive artificials out of the basis
    for (int i = 0; i < m; ++i) {
      if (tab.basis()[static_cast<std::size_t>(i)] < art0) continue;
      int col = -1;
      double best = tol;
      for (int j = 0; j < art0; ++j) {
        if (std::abs(tab.data()(i, j)) > best) {
          best = std::abs(tab.data()(i, j));
          col = j;
        }
      }
      if (col >= 0) {
        tab.pivot(i, col);
      } else {
        // redundant row
        tab.data().row(i).setZero();
      }
    }
    for (int j = art0; j < total; ++j) allowed[static_cast<std::size_t>(j)] = false;
  }

  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(total);
  c2.head(n) = lp.c;
  tab.set_objective(c2);
  const bool bounded = tab.optimize(allowed);
  result.pivots = tab.pivots();
  if (!bounded) {
    result.status = LpStatus::unbounded;
    return result;
  }
  result.status = LpStatus::optimal;
  result.x = Eigen::VectorXd::Zero(n);
  // recompute the basic solution from the original rows to shed accumulated rounding
  Eigen::MatrixXd bmat(m, m);
  for (int i = 0; i < m; ++i) bmat.col(i) = original.col(tab.basis()[static_cast<std::size_t>(i)]).head(m);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(bmat);
  Eigen::VectorXd xb;
  if (m > 0 && lu.isInvertible()) {
    xb = lu.solve(original.col(total).head(m));
  } else {
    xb = tab.data().col(total).head(m);
  }
  for (int i = 0; i < m; ++i) {
    const int b = tab.basis()[static_cast<std::size_t>(i)];
    if (b < n) result.x(b) = std::max(xb(i), 0.0);
  }
  result.value = lp.c.dot(result.x);
  return result;
}

}  // namespace shadowprice
