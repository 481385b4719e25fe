#include "shadowprice/primal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "shadowprice/barrier.hpp"
#include "shadowprice/errors.hpp"
#include "shadowprice/lp.hpp"

namespace shadowprice {

Bounds BoxConstraints::get(NodeIndex node) const {
  Bounds out;
  for (const auto& [n, b] : entries_) {
    if (n != node) continue;
    out.lo = std::max(out.lo, b.lo);
    out.hi = std::min(out.hi, b.hi);
  }
  return out;
}

bool BoxConstraints::unbounded(double big) const {
  return std::all_of(entries_.begin(), entries_.end(), [big](const auto& e) {
    return e.second.lo <= -big && e.second.hi >= big;
  });
}

BoxConstraints BoxConstraints::intersect(const BoxConstraints& a, const BoxConstraints& b) {
  BoxConstraints out = a;
  for (const auto& e : b.entries_) out.entries_.push_back(e);
  return out;
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

namespace {

// Leaf wealth w = w0 + W x over variables x = (free gamma values, bought amounts M).
// M_n >= max(dgamma_n, 0) carries the ask premium at nodes with a positive spread;
// at zero-spread nodes the premium vanishes and M is dropped.
struct WealthProgram {
  Eigen::VectorXd w0;
  Eigen::MatrixXd w;
  Eigen::MatrixXd g_struct;  // rows M >= 0, dgamma - M <= 0 (rhs h_struct)
  Eigen::VectorXd h_struct;
  Eigen::MatrixXd g;         // g_struct plus box rows
  Eigen::VectorXd h;
  std::vector<int> gamma_var;    // per node, -1 if fixed or terminal
  std::vector<double> gamma_fixed;
  std::vector<int> bought_var;   // per node, -1 if no premium variable
  std::vector<Bounds> box;       // per free gamma variable, as given
  int n_gamma = 0;
  int n = 0;
};

bool is_infinite(double v, double big) { return !std::isfinite(v) || std::abs(v) >= big; }

WealthProgram build_program(const ScenarioTree& tree, const AdaptedProcess& bid,
                            const AdaptedProcess& ask, const BoxConstraints& box,
                            const SolverOptions& options) {
  WealthProgram prog;
  const auto nodes = static_cast<int>(tree.size());
  prog.gamma_var.assign(static_cast<std::size_t>(nodes), -1);
  prog.gamma_fixed.assign(static_cast<std::size_t>(nodes), 0.0);
  prog.bought_var.assign(static_cast<std::size_t>(nodes), -1);

  for (int i = 0; i < nodes; ++i) {
    if (tree.is_leaf(i)) continue;
    const Bounds b = box.get(i);
    if (std::isnan(b.lo) || std::isnan(b.hi) || b.lo > b.hi) {
      throw ModelError("holding bounds are empty", tree.node(i).id);
    }
    if (b.lo > 0.0 || b.hi < 0.0) {
      throw ModelError("holding bounds must contain 0", tree.node(i).id);
    }
    if (b.hi - b.lo <= 1e-14) {
      prog.gamma_fixed[static_cast<std::size_t>(i)] = 0.0;
      continue;
    }
    prog.gamma_var[static_cast<std::size_t>(i)] = prog.n_gamma++;
    prog.box.push_back(b);
  }
  int n = prog.n_gamma;
  for (int i = 0; i < nodes; ++i) {
    if (ask[i] - bid[i] > 0.0) prog.bought_var[static_cast<std::size_t>(i)] = n++;
  }
  prog.n = n;

  // dgamma_n = D.row(n) x + d0(n)
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nodes, n);
  Eigen::VectorXd d0 = Eigen::VectorXd::Zero(nodes);
  for (int i = 0; i < nodes; ++i) {
    const auto& node = tree.node(i);
    if (!tree.is_leaf(i)) {
      const int v = prog.gamma_var[static_cast<std::size_t>(i)];
      if (v >= 0) d(i, v) += 1.0;
      else d0(i) += prog.gamma_fixed[static_cast<std::size_t>(i)];
    }
    if (node.parent != kRoot) {
      const int v = prog.gamma_var[static_cast<std::size_t>(node.parent)];
      if (v >= 0) d(i, v) -= 1.0;
      else d0(i) -= prog.gamma_fixed[static_cast<std::size_t>(node.parent)];
    }
  }

  const auto leaves = static_cast<int>(tree.leaf_count());
  prog.w0 = Eigen::VectorXd::Ones(leaves);
  prog.w = Eigen::MatrixXd::Zero(leaves, n);
  for (int l = 0; l < leaves; ++l) {
    for (NodeIndex i : tree.path(static_cast<std::size_t>(l))) {
      prog.w.row(l) -= bid[i] * d.row(i);
      prog.w0(l) -= bid[i] * d0(i);
      const int m = prog.bought_var[static_cast<std::size_t>(i)];
      if (m >= 0) prog.w(l, m) -= ask[i] - bid[i];
    }
  }

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  for (int i = 0; i < nodes; ++i) {
    const int m = prog.bought_var[static_cast<std::size_t>(i)];
    if (m < 0) continue;
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
    r(m) = -1.0;
    rows.push_back(r);
    rhs.push_back(0.0);
    Eigen::RowVectorXd s = d.row(i);
    s(m) -= 1.0;
    rows.push_back(s);
    rhs.push_back(-d0(i));
  }
  const auto n_struct = static_cast<Eigen::Index>(rows.size());
  const double big = options.internal_bound;
  for (int v = 0; v < prog.n_gamma; ++v) {
    const Bounds& b = prog.box[static_cast<std::size_t>(v)];
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
    r(v) = 1.0;
    rows.push_back(r);
    rhs.push_back(is_infinite(b.hi, big) ? big : b.hi);
    rows.push_back(-r);
    rhs.push_back(is_infinite(b.lo, big) ? big : -b.lo);
  }
  // premium variables only need a cap to keep the barrier region bounded
  for (int i = 0; i < nodes; ++i) {
    const int m = prog.bought_var[static_cast<std::size_t>(i)];
    if (m < 0) continue;
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(n);
    r(m) = 1.0;
    rows.push_back(r);
    rhs.push_back(4.0 * big);
  }

  prog.g.resize(static_cast<Eigen::Index>(rows.size()), n);
  prog.h.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    prog.g.row(static_cast<Eigen::Index>(k)) = rows[k];
    prog.h(static_cast<Eigen::Index>(k)) = rhs[k];
  }
  prog.g_struct = prog.g.topRows(n_struct);
  prog.h_struct = prog.h.head(n_struct);
  return prog;
}

// Improving direction of the recession cone, or nothing when the objective cannot
// grow without bound. For utilities with a positive domain or an upper bound the
// direction must keep every leaf gain nonnegative; for linear utility only the
// expected gain matters.
std::optional<Eigen::VectorXd> recession_direction(const WealthProgram& prog,
                                                   const std::vector<double>& probs,
                                                   const ScalarUtility& u, double big) {
  // u = [d+ for gamma with infinite hi | d- for gamma with infinite lo | dM]
  std::vector<Eigen::VectorXd> cols;
  std::vector<bool> capped;
  for (int v = 0; v < prog.n_gamma; ++v) {
    const Bounds& b = prog.box[static_cast<std::size_t>(v)];
    if (is_infinite(b.hi, big)) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(prog.n);
      c(v) = 1.0;
      cols.push_back(c);
      capped.push_back(true);
    }
    if (is_infinite(b.lo, big)) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(prog.n);
      c(v) = -1.0;
      cols.push_back(c);
      capped.push_back(true);
    }
  }
  bool any_gamma = !cols.empty();
  if (!any_gamma) return std::nullopt;
  for (int j = prog.n_gamma; j < prog.n; ++j) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(prog.n);
    c(j) = 1.0;
    cols.push_back(c);
    capped.push_back(false);
  }
  const auto nu = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd p(prog.n, nu);
  for (Eigen::Index k = 0; k < nu; ++k) p.col(k) = cols[static_cast<std::size_t>(k)];

  const Eigen::MatrixXd wp = prog.w * p;
  const Eigen::MatrixXd sp = prog.g_struct * p;
  const bool gains_nonnegative = u.kind() != UtilityKind::linear;
  const auto leaves = wp.rows();

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  for (Eigen::Index r = 0; r < sp.rows(); ++r) {
    rows.push_back(sp.row(r));
    rhs.push_back(0.0);
  }
  for (Eigen::Index k = 0; k < nu; ++k) {
    if (!capped[static_cast<std::size_t>(k)]) continue;
    Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(nu);
    r(k) = 1.0;
    rows.push_back(r);
    rhs.push_back(1.0);
  }
  if (gains_nonnegative) {
    for (Eigen::Index l = 0; l < leaves; ++l) {
      rows.push_back(-wp.row(l));
      rhs.push_back(0.0);
    }
  }

  LinearProgram lp;
  lp.a_ub.resize(static_cast<Eigen::Index>(rows.size()), nu);
  lp.b_ub.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    lp.a_ub.row(static_cast<Eigen::Index>(k)) = rows[k];
    lp.b_ub(static_cast<Eigen::Index>(k)) = rhs[k];
  }
  lp.a_eq.resize(0, nu);
  lp.b_eq.resize(0);
  lp.c = Eigen::VectorXd::Zero(nu);
  const double pmax = *std::max_element(probs.begin(), probs.end());
  for (Eigen::Index l = 0; l < leaves; ++l) {
    const double weight = gains_nonnegative ? 1.0 : probs[static_cast<std::size_t>(l)] / pmax;
    lp.c += weight * wp.row(l).transpose();
  }
  const LpResult res = solve_lp(lp);
  if (res.status == LpStatus::unbounded) {
    throw StructuralError("recession program unexpectedly unbounded");
  }
  if (res.status != LpStatus::optimal || res.value <= 1e-9) return std::nullopt;
  return Eigen::VectorXd(p * res.x);
}

Strategy gamma_from(const ScenarioTree& tree, const WealthProgram& prog, const Eigen::VectorXd& x,
                    bool direction) {
  Strategy s = Strategy::zero(tree);
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    if (tree.is_leaf(i)) continue;
    const int v = prog.gamma_var[static_cast<std::size_t>(i)];
    s.gamma[i] = v >= 0 ? x(v) : (direction ? 0.0 : prog.gamma_fixed[static_cast<std::size_t>(i)]);
  }
  return s;
}

// gamma near 0 inside the box, premiums just above their lower bound.
Eigen::VectorXd start_point(const ScenarioTree& tree, const AdaptedProcess& bid,
                            const AdaptedProcess& ask, const WealthProgram& prog,
                            const ScalarUtility& u, double big) {
  double price_scale = 1.0;
  double spread_path = 0.0;
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    price_scale = std::max(price_scale, std::abs(bid[i]));
  }
  for (std::size_t l = 0; l < tree.leaf_count(); ++l) {
    double acc = 0.0;
    for (NodeIndex i : tree.path(l)) acc += ask[i] - bid[i];
    spread_path = std::max(spread_path, acc);
  }
  double delta = 1e-6 / price_scale;
  double eps = 1e-3 / (1.0 + spread_path);
  for (int attempt = 0; attempt < 40; ++attempt) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(prog.n);
    for (int v = 0; v < prog.n_gamma; ++v) {
      const Bounds& b = prog.box[static_cast<std::size_t>(v)];
      const double lo = is_infinite(b.lo, big) ? -big : b.lo;
      const double hi = is_infinite(b.hi, big) ? big : b.hi;
      const double step = std::min(delta, (hi - lo) / 4.0);
      x(v) = std::clamp(0.0, lo + step, hi - step);
    }
    // premiums: M = max(dgamma, 0) + eps
    const Eigen::VectorXd gx = prog.g_struct * x;
    for (Eigen::Index r = 1; r < prog.g_struct.rows(); r += 2) {
      // row r is dgamma - M <= h with M currently 0
      Eigen::Index m = 0;
      prog.g_struct.row(r - 1).minCoeff(&m);
      const double dg = gx(r) - prog.h_struct(r);
      x(m) = std::max(dg, 0.0) + eps;
    }
    const Eigen::VectorXd wealth = prog.w0 + prog.w * x;
    const Eigen::VectorXd slack = prog.h - prog.g * x;
    const bool ok_box = slack.size() == 0 || slack.minCoeff() > 0.0;
    const bool ok_wealth = !u.positive_domain() || wealth.minCoeff() > 0.0;
    if (ok_box && ok_wealth) return x;
    delta /= 10.0;
    eps /= 10.0;
  }
  throw DomainError("could not find a strictly feasible starting portfolio");
}

PrimalSolution solve_program(const ScenarioTree& tree, const AdaptedProcess& bid,
                             const AdaptedProcess& ask, const UtilityFunctional& phi,
                             const BoxConstraints& box, const SolverOptions& options,
                             bool frictional) {
  if (phi.banach_weight != 0.0) {
    throw ConfigurationError(
        "Banach-limit term requires a tail beyond the tree; evaluate such functionals directly");
  }
  const ScalarUtility& u = phi.scalar;
  const WealthProgram prog = build_program(tree, bid, ask, box, options);
  const std::vector<double> probs = tree.leaf_probabilities();

  PrimalSolution sol;
  sol.gamma_star = Strategy::zero(tree);

  if (auto dir = recession_direction(prog, probs, u, options.internal_bound)) {
    sol.status = SolveStatus::unbounded;
    sol.unbounded_direction = gamma_from(tree, prog, *dir, true);
    if (u.bounded_above()) {
      sol.lambda = std::numeric_limits<double>::quiet_NaN();
      sol.message = "supremum not attained: an arbitrage direction exists";
    } else {
      sol.lambda = kInf;
      sol.message = "objective unbounded above along the reported direction";
    }
    return sol;
  }

  const Eigen::VectorXd x0 = start_point(tree, bid, ask, prog, u, options.internal_bound);
  Eigen::VectorXd pw(probs.size());
  for (std::size_t l = 0; l < probs.size(); ++l) pw(static_cast<Eigen::Index>(l)) = probs[l];

  ConvexObjective f = [&](const Eigen::VectorXd& x, double& value, Eigen::VectorXd* grad,
                          Eigen::MatrixXd* hess) {
    const Eigen::VectorXd wealth = prog.w0 + prog.w * x;
    value = 0.0;
    Eigen::VectorXd d1(wealth.size());
    Eigen::VectorXd d2(wealth.size());
    for (Eigen::Index l = 0; l < wealth.size(); ++l) {
      const double v = u.value(wealth(l));
      if (!std::isfinite(v)) return false;
      value -= pw(l) * v;
      if (grad != nullptr) {
        d1(l) = pw(l) * u.derivative(wealth(l));
        d2(l) = pw(l) * u.second_derivative(wealth(l));
      }
    }
    if (grad != nullptr) *grad = -(prog.w.transpose() * d1);
    if (hess != nullptr) *hess = -(prog.w.transpose() * d2.asDiagonal() * prog.w);
    return true;
  };

  BarrierOptions bopt;
  bopt.tol_gap = options.tol_gap;
  bopt.max_newton = options.max_iter;
  const BarrierResult br = barrier_minimize(f, prog.g, prog.h, x0, bopt);

  sol.gamma_star = gamma_from(tree, prog, br.x, false);
  sol.status = br.status == BarrierStatus::converged ? SolveStatus::optimal : SolveStatus::max_iter;
  sol.message = br.message;

  RandomVariable wealth = frictional ? terminal_wealth(tree, {bid, ask}, sol.gamma_star)
                                     : frictionless_wealth(tree, bid, sol.gamma_star);
  sol.lambda = evaluate(phi, wealth, tree);

  const Eigen::VectorXd solver_wealth = prog.w0 + prog.w * br.x;
  double slack = 0.0;
  for (std::size_t l = 0; l < wealth.values.size(); ++l) {
    slack = std::max(slack, std::abs(wealth.values[l] - solver_wealth(static_cast<Eigen::Index>(l))));
  }
  Eigen::VectorXd grad(prog.n);
  Eigen::MatrixXd hess(prog.n, prog.n);
  double fx = 0.0;
  f(br.x, fx, &grad, &hess);
  sol.residuals.gap_bound = br.gap_bound;
  sol.residuals.newton_decrement = br.decrement;
  sol.residuals.stationarity = (grad + prog.g.transpose() * br.multipliers).cwiseAbs().maxCoeff();
  sol.residuals.wealth_slack = slack;
  sol.residuals.newton_iterations = br.newton_iterations;

  if (sol.lambda > options.unbounded_ceiling) {
    sol.status = SolveStatus::unbounded;
    sol.message = "objective exceeded the unboundedness ceiling";
  }

  // bond / sold / bought bookkeeping along each node's history
  const AdaptedProcess& g = sol.gamma_star.gamma;
  PrimalDecomposition dec{AdaptedProcess::full(tree), AdaptedProcess::full(tree),
                          AdaptedProcess::full(tree), AdaptedProcess::full(tree)};
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    const auto& node = tree.node(i);
    const double held = tree.is_leaf(i) ? 0.0 : g[i];
    const double prev_gamma = node.parent == kRoot ? 0.0 : g[node.parent];
    const double prev_beta = node.parent == kRoot ? 1.0 : dec.beta[node.parent];
    const double inc = held - prev_gamma;
    dec.gamma[i] = held;
    dec.sold[i] = std::max(-inc, 0.0);
    dec.bought[i] = std::max(inc, 0.0);
    const double sell_price = bid[i];
    const double buy_price = frictional ? ask[i] : bid[i];
    dec.beta[i] = prev_beta + sell_price * dec.sold[i] - buy_price * dec.bought[i];
  }
  sol.decomposition = std::move(dec);
  return sol;
}

}  // namespace

PrimalSolution solve_primal(const PrimalProblem& problem) {
  problem.market.validate(problem.tree);
  const BoxConstraints box =
      BoxConstraints::intersect(problem.constraints, problem.truncation_bounds);
  return solve_program(problem.tree, problem.market.bid, problem.market.ask, problem.phi, box,
                       problem.options, true);
}

PrimalSolution solve_frictionless(const ScenarioTree& tree, const AdaptedProcess& price,
                                  const UtilityFunctional& phi, const BoxConstraints& constraints,
                                  const SolverOptions& options) {
  require_coverage(tree, price, 0, tree.horizon(), "price");
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    if (!std::isfinite(price[i])) throw ModelError("price is not finite", tree.node(i).id);
  }
  return solve_program(tree, price, price, phi, constraints, options, false);
}

double primal_objective(const PrimalProblem& problem, const Strategy& gamma) {
  return evaluate(problem.phi, terminal_wealth(problem.tree, problem.market, gamma), problem.tree);
}

ArbitrageReport detect_arbitrage(const ScenarioTree& tree, const AdaptedProcess& price) {
  require_coverage(tree, price, 0, tree.horizon(), "price");
  const auto leaves = static_cast<Eigen::Index>(tree.leaf_count());
  const auto nodes = static_cast<NodeIndex>(tree.size());

  // variables: leaf masses q (L), s; maximize s with q_l >= s
  LinearProgram lp;
  const Eigen::Index nv = leaves + 1;
  lp.a_ub = Eigen::MatrixXd::Zero(leaves, nv);
  lp.b_ub = Eigen::VectorXd::Zero(leaves);
  for (Eigen::Index l = 0; l < leaves; ++l) {
    lp.a_ub(l, l) = -1.0;
    lp.a_ub(l, leaves) = 1.0;
  }
  std::vector<Eigen::RowVectorXd> eq;
  Eigen::RowVectorXd mass = Eigen::RowVectorXd::Zero(nv);
  mass.head(leaves).setOnes();
  eq.push_back(mass);
  for (NodeIndex n = 0; n < nodes; ++n) {
    if (tree.is_leaf(n)) continue;
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
    double scale = 0.0;
    for (NodeIndex c : tree.node(n).children) {
      const double inc = price[c] - price[n];
      scale = std::max(scale, std::abs(inc));
      const auto [first, last] = tree.leaf_range(c);
      for (std::size_t l = first; l < last; ++l) row(static_cast<Eigen::Index>(l)) = inc;
    }
    if (scale == 0.0) continue;
    eq.push_back(row / scale);
  }
  lp.a_eq.resize(static_cast<Eigen::Index>(eq.size()), nv);
  for (std::size_t k = 0; k < eq.size(); ++k) lp.a_eq.row(static_cast<Eigen::Index>(k)) = eq[k];
  lp.b_eq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(eq.size()));
  lp.b_eq(0) = 1.0;
  lp.c = Eigen::VectorXd::Zero(nv);
  lp.c(leaves) = 1.0;

  const LpResult res = solve_lp(lp);
  ArbitrageReport report;
  report.margin = res.status == LpStatus::optimal ? res.value : 0.0;
  report.arbitrage = res.status != LpStatus::optimal || res.value <= 1e-12;

  if (!report.arbitrage) {
    AdaptedProcess z = AdaptedProcess::full(tree);
    for (NodeIndex n = 0; n < nodes; ++n) {
      const auto [first, last] = tree.leaf_range(n);
      double q = 0.0;
      for (std::size_t l = first; l < last; ++l) q += res.x(static_cast<Eigen::Index>(l));
      z[n] = q / tree.node(n).p;
    }
    report.deflator = std::move(z);
    return report;
  }

  // one-step scan: a node whose price increments all share a sign
  for (NodeIndex n = 0; n < nodes; ++n) {
    if (tree.is_leaf(n)) continue;
    bool all_up = true;
    bool all_down = true;
    bool any_move = false;
    for (NodeIndex c : tree.node(n).children) {
      const double inc = price[c] - price[n];
      if (inc < 0.0) all_up = false;
      if (inc > 0.0) all_down = false;
      if (inc != 0.0) any_move = true;
    }
    if (any_move && (all_up || all_down)) {
      Strategy s = Strategy::zero(tree);
      s.gamma[n] = all_up ? 1.0 : -1.0;
      report.certificate = std::move(s);
      return report;
    }
  }
  // fall back on the recession program of the frictionless log problem
  SolverOptions options;
  const WealthProgram prog = build_program(tree, price, price, {}, options);
  if (auto dir = recession_direction(prog, tree.leaf_probabilities(), ScalarUtility::log(),
                                     options.internal_bound)) {
    report.certificate = gamma_from(tree, prog, *dir, true);
  }
  return report;
}

}  // namespace shadowprice
