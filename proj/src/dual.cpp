#include "shadowprice/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "shadowprice/barrier.hpp"
#include "shadowprice/errors.hpp"
#include "shadowprice/lp.hpp"

namespace shadowprice {

namespace {

// Row mapping leaf values of a P-martingale to its value at node n.
Eigen::RowVectorXd aggregation_row(const ScenarioTree& tree, NodeIndex n,
                                   const std::vector<double>& probs) {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(probs.size()));
  const auto [first, last] = tree.leaf_range(n);
  const double pn = tree.node(n).p;
  for (std::size_t l = first; l < last; ++l) row(static_cast<Eigen::Index>(l)) = probs[l] / pn;
  return row;
}

DualVariable from_leaves(const ScenarioTree& tree, const std::vector<double>& probs,
                         const Eigen::VectorXd& z1, const Eigen::VectorXd& z2) {
  DualVariable z{AdaptedProcess::full(tree), AdaptedProcess::full(tree)};
  for (NodeIndex n = 0; n < static_cast<NodeIndex>(tree.size()); ++n) {
    const Eigen::RowVectorXd a = aggregation_row(tree, n, probs);
    z.z1[n] = a.dot(z1);
    z.z2[n] = a.dot(z2);
  }
  return z;
}

// Orthonormal basis of the null space of a.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, Eigen::Index n) {
  if (a.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-11 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cutoff) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

}  // namespace

double dual_objective(const PrimalProblem& problem, const DualVariable& z) {
  const auto& tree = problem.tree;
  const ScalarUtility& u = problem.phi.scalar;
  double total = 0.0;
  for (NodeIndex leaf : tree.leaves()) {
    const double x = z.z1[leaf];
    double v = 0.0;
    if (u.kind() == UtilityKind::linear) {
      v = std::abs(x - 1.0) <= 1e-12 ? 0.0 : -kInf;
    } else if (u.positive_domain() && x <= 0.0) {
      v = -kInf;
    } else if (x < 0.0) {
      v = -kInf;
    } else {
      v = u.conjugate(x);
    }
    total += tree.node(leaf).p * (v - x);
  }
  return total;
}

DualFeasibility check_dual(const PrimalProblem& problem, const DualVariable& z) {
  const auto& tree = problem.tree;
  DualFeasibility f;
  f.martingale_violation = std::max(is_martingale(tree, z.z1, 0.0).max_violation,
                                    is_martingale(tree, z.z2, 0.0).max_violation);
  f.min_z1 = kInf;
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    f.spread_violation = std::max({f.spread_violation, -z.z3(problem.market, i),
                                   -z.z4(problem.market, i)});
    f.min_z1 = std::min(f.min_z1, z.z1[i]);
  }
  return f;
}

DualSolution solve_dual(const PrimalProblem& problem) {
  const auto& tree = problem.tree;
  const auto& market = problem.market;
  market.validate(tree);
  if (problem.phi.banach_weight != 0.0) {
    throw ConfigurationError("dual solver handles plain expected utility only");
  }
  const double big = problem.options.internal_bound;
  if (!problem.constraints.unbounded(big) || !problem.truncation_bounds.unbounded(big)) {
    throw ConfigurationError("dual solver does not support finite holdings bounds");
  }
  const ScalarUtility& u = problem.phi.scalar;
  const bool linear = u.kind() == UtilityKind::linear;
  const std::vector<double> probs = tree.leaf_probabilities();
  const auto L = static_cast<Eigen::Index>(probs.size());
  const Eigen::Index n = 2 * L;

  // inequality rows over x = (z1, z2):  G x <= 0
  std::vector<Eigen::RowVectorXd> ineq;
  std::vector<Eigen::RowVectorXd> eq;
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    const Eigen::RowVectorXd a = aggregation_row(tree, i, probs);
    Eigen::RowVectorXd lower = Eigen::RowVectorXd::Zero(n);
    lower.head(L) = market.bid[i] * a;
    lower.tail(L) = -a;
    if (market.spread(i) > 0.0) {
      Eigen::RowVectorXd upper = Eigen::RowVectorXd::Zero(n);
      upper.head(L) = -market.ask[i] * a;
      upper.tail(L) = a;
      ineq.push_back(lower / std::max(1.0, market.ask[i]));
      ineq.push_back(upper / std::max(1.0, market.ask[i]));
    } else {
      eq.push_back(lower / std::max(1.0, market.ask[i]));
    }
  }
  for (Eigen::Index l = 0; l < L; ++l) {
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
    if (linear) {
      r(l) = 1.0;
      eq.push_back(r);
    } else {
      r(l) = -1.0;
      ineq.push_back(r);
    }
  }
  std::vector<double> eq_rhs(eq.size(), 0.0);
  if (linear) {
    for (std::size_t k = eq.size() - static_cast<std::size_t>(L); k < eq.size(); ++k) eq_rhs[k] = 1.0;
  }

  // phase one: maximize the common slack s of the inequalities
  LinearProgram lp;
  const auto m_in = static_cast<Eigen::Index>(ineq.size());
  lp.a_ub = Eigen::MatrixXd::Zero(m_in + 1, n + 1);
  lp.b_ub = Eigen::VectorXd::Zero(m_in + 1);
  for (Eigen::Index k = 0; k < m_in; ++k) {
    lp.a_ub.row(k).head(n) = ineq[static_cast<std::size_t>(k)];
    lp.a_ub(k, n) = 1.0;
  }
  lp.a_ub(m_in, n) = 1.0;
  lp.b_ub(m_in) = 1.0;
  const auto m_eq = static_cast<Eigen::Index>(eq.size());
  const Eigen::Index extra = linear ? 0 : 1;
  lp.a_eq = Eigen::MatrixXd::Zero(m_eq + extra, n + 1);
  lp.b_eq = Eigen::VectorXd::Zero(m_eq + extra);
  for (Eigen::Index k = 0; k < m_eq; ++k) {
    lp.a_eq.row(k).head(n) = eq[static_cast<std::size_t>(k)];
    lp.b_eq(k) = eq_rhs[static_cast<std::size_t>(k)];
  }
  if (!linear) {
    for (Eigen::Index l = 0; l < L; ++l) lp.a_eq(m_eq, l) = probs[static_cast<std::size_t>(l)];
    lp.b_eq(m_eq) = 1.0;
  }
  lp.c = Eigen::VectorXd::Zero(n + 1);
  lp.c(n) = 1.0;
  const LpResult start = solve_lp(lp);

  DualSolution sol;
  if (start.status != LpStatus::optimal || start.value <= 1e-12) {
    sol.status = SolveStatus::infeasible;
    sol.value = -kInf;
    sol.message = "no strictly feasible dual pair: the bid/ask model admits no consistent price system";
    return sol;
  }
  const Eigen::VectorXd x0 = start.x.head(n);
  Eigen::MatrixXd g(m_in, n);
  for (Eigen::Index k = 0; k < m_in; ++k) g.row(k) = ineq[static_cast<std::size_t>(k)];
  sol.strict_margin = m_in > 0 ? (-(g * x0)).minCoeff() : start.value;
  if (sol.strict_margin <= 1e-13) {
    sol.status = SolveStatus::infeasible;
    sol.value = -kInf;
    sol.message = "dual start point lost strict feasibility to rounding";
    return sol;
  }
  Eigen::MatrixXd a_eq(m_eq, n);
  for (Eigen::Index k = 0; k < m_eq; ++k) a_eq.row(k) = eq[static_cast<std::size_t>(k)];
  const Eigen::MatrixXd basis = null_space(a_eq, n);
  const Eigen::MatrixXd gy = g * basis;
  const Eigen::VectorXd hy = -(g * x0);

  Eigen::VectorXd pw(L);
  for (Eigen::Index l = 0; l < L; ++l) pw(l) = probs[static_cast<std::size_t>(l)];

  // minimize -E[V(z1) - z1] over y with x = x0 + basis y
  ConvexObjective f = [&](const Eigen::VectorXd& y, double& value, Eigen::VectorXd* grad,
                          Eigen::MatrixXd* hess) {
    const Eigen::VectorXd x = x0 + basis * y;
    if (linear) {
      value = 1.0;
      if (grad != nullptr) *grad = Eigen::VectorXd::Zero(y.size());
      if (hess != nullptr) *hess = Eigen::MatrixXd::Zero(y.size(), y.size());
      return true;
    }
    value = 0.0;
    Eigen::VectorXd gx = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd hx = Eigen::VectorXd::Zero(n);
    for (Eigen::Index l = 0; l < L; ++l) {
      const double z = x(l);
      if (z <= 0.0) return false;
      value -= pw(l) * (u.conjugate(z) - z);
      gx(l) = -pw(l) * (u.conjugate_derivative(z) - 1.0);
      hx(l) = -pw(l) * u.conjugate_second_derivative(z);
    }
    if (grad != nullptr) *grad = basis.transpose() * gx;
    if (hess != nullptr) *hess = basis.transpose() * hx.asDiagonal() * basis;
    return true;
  };

  BarrierOptions bopt;
  bopt.tol_gap = problem.options.tol_gap;
  bopt.max_newton = problem.options.max_iter;
  const BarrierResult br = barrier_minimize(f, gy, hy, Eigen::VectorXd::Zero(basis.cols()), bopt);
  Eigen::VectorXd x = x0 + basis * br.x;
  if (linear) x.head(L).setOnes();

  sol.z = from_leaves(tree, probs, x.head(L), x.tail(L));
  sol.value = linear ? -1.0 : -br.value;
  sol.status = br.status == BarrierStatus::converged ? SolveStatus::optimal : SolveStatus::max_iter;
  sol.message = br.message;
  sol.residuals.gap_bound = br.gap_bound;
  sol.residuals.newton_decrement = br.decrement;
  sol.residuals.newton_iterations = br.newton_iterations;
  if (br.x.size() > 0) {
    Eigen::VectorXd grad(br.x.size());
    Eigen::MatrixXd hess(br.x.size(), br.x.size());
    double fx = 0.0;
    f(br.x, fx, &grad, &hess);
    sol.residuals.stationarity = (grad + gy.transpose() * br.multipliers).cwiseAbs().maxCoeff();
  }
  return sol;
}

ShadowPriceExtraction extract_shadow_price(const ScenarioTree& tree, const BidAskModel& market,
                                           const DualVariable& z) {
  require_coverage(tree, z.z1, 0, tree.horizon(), "Z1");
  require_coverage(tree, z.z2, 0, tree.horizon(), "Z2");
  double scale1 = 0.0;
  double scale2 = 0.0;
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    scale1 = std::max(scale1, std::abs(z.z1[i]));
    scale2 = std::max(scale2, std::abs(z.z2[i]));
  }
  ShadowPriceExtraction out{AdaptedProcess::full(tree), {}};
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    const double bid = market.bid[i];
    const double ask = market.ask[i];
    if (z.z1[i] <= 1e-14 * scale1) {
      if (z.z2[i] > 1e-12 * std::max(1.0, scale2)) {
        throw ModelError("Z1 vanishes while Z2 is positive", tree.node(i).id);
      }
      out.s_star[i] = 0.5 * (bid + ask);
      out.degenerate_nodes.push_back(i);
      continue;
    }
    out.s_star[i] = std::clamp(z.z2[i] / z.z1[i], bid, ask);
  }
  return out;
}

ShadowPriceCertificate verify_shadow(const PrimalProblem& problem, const AdaptedProcess& s_star,
                                     const VerifyOptions& options) {
  const auto& tree = problem.tree;
  const auto& market = problem.market;
  require_coverage(tree, s_star, 0, tree.horizon(), "candidate price");

  ShadowPriceCertificate cert;
  cert.s_star = s_star;
  cert.options = options;
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    if (!(s_star[i] >= market.bid[i] && s_star[i] <= market.ask[i])) {
      cert.within_spread = false;
      cert.outside_spread.push_back(i);
    }
  }

  const PrimalSolution primal = solve_primal(problem);
  cert.lambda = primal.lambda;
  cert.primal_status = primal.status;
  cert.gamma_star = primal.gamma_star;

  const PrimalSolution fl =
      solve_frictionless(tree, s_star, problem.phi, problem.constraints, problem.options);
  cert.mu = fl.lambda;
  cert.frictionless_status = fl.status;
  if (fl.status == SolveStatus::unbounded) {
    ArbitrageReport rep = detect_arbitrage(tree, s_star);
    if (!rep.certificate && fl.unbounded_direction) rep.certificate = fl.unbounded_direction;
    rep.arbitrage = true;
    cert.arbitrage = std::move(rep);
  }
  if (!problem.truncation_bounds.empty()) {
    const auto box = BoxConstraints::intersect(problem.constraints, problem.truncation_bounds);
    cert.constrained_mu = solve_frictionless(tree, s_star, problem.phi, box, problem.options).lambda;
  }
  cert.gap = std::isfinite(cert.mu) && std::isfinite(cert.lambda) ? std::abs(cert.lambda - cert.mu)
                                                                  : kInf;

  bool slack_ok = true;
  if (primal.status == SolveStatus::optimal) {
    for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
      SlacknessEntry e;
      e.node = i;
      e.increment = primal.gamma_star.increment(tree, i);
      e.s_star = s_star[i];
      e.bid = market.bid[i];
      e.ask = market.ask[i];
      if (e.increment > options.active) {
        e.side = "buy";
        e.deviation = std::abs(e.s_star - e.ask);
      } else if (e.increment < -options.active) {
        e.side = "sell";
        e.deviation = std::abs(e.s_star - e.bid);
      } else {
        e.side = "none";
      }
      e.ok = e.deviation <= options.tol_slackness;
      slack_ok = slack_ok && e.ok;
      cert.slackness.push_back(std::move(e));
    }
  }
  cert.passed = cert.within_spread && primal.status == SolveStatus::optimal &&
                fl.status == SolveStatus::optimal && cert.gap <= options.tol_gap && slack_ok;
  return cert;
}

}  // namespace shadowprice
