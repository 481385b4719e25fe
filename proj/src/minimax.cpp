#include "shadowprice/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "shadowprice/errors.hpp"
#include "shadowprice/parallel.hpp"

namespace shadowprice {

int GridSpec::gamma_points() const {
  if (!(gamma_step > 0.0) || !(gamma_hi > gamma_lo)) return 0;
  return static_cast<int>(std::floor((gamma_hi - gamma_lo) / gamma_step + 1e-9)) + 1;
}

namespace {

struct Grids {
  std::vector<std::vector<double>> s_values;  // per node
  std::vector<NodeIndex> hold_nodes;          // non-terminal nodes
  std::vector<double> gamma_values;
  double s_size = 1.0;
  double gamma_size = 1.0;
};

Grids make_grids(const PrimalProblem& problem, const GridSpec& spec) {
  const auto& tree = problem.tree;
  if (spec.s_points < 2) throw ConfigurationError("S grid needs at least 2 points per node");
  const int gp = spec.gamma_points();
  if (gp < 2) throw ConfigurationError("gamma grid needs at least 2 points");
  Grids g;
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    const double bid = problem.market.bid[i];
    const double ask = problem.market.ask[i];
    std::vector<double> vals;
    if (ask > bid) {
      for (int k = 0; k < spec.s_points; ++k) {
        vals.push_back(k + 1 == spec.s_points ? ask : bid + (ask - bid) * k / (spec.s_points - 1));
      }
    } else {
      vals.push_back(bid);
    }
    g.s_size *= static_cast<double>(vals.size());
    g.s_values.push_back(std::move(vals));
    if (!tree.is_leaf(i)) g.hold_nodes.push_back(i);
  }
  for (int k = 0; k < gp; ++k) g.gamma_values.push_back(spec.gamma_lo + spec.gamma_step * k);
  g.gamma_size = std::pow(static_cast<double>(gp), static_cast<double>(g.hold_nodes.size()));
  return g;
}

// Mixed-radix decoding of a flat grid index.
void decode(std::size_t index, const std::vector<std::size_t>& radix, std::vector<std::size_t>& digits) {
  for (std::size_t d = 0; d < radix.size(); ++d) {
    digits[d] = index % radix[d];
    index /= radix[d];
  }
}

std::size_t encode(const std::vector<std::size_t>& digits, const std::vector<std::size_t>& radix) {
  std::size_t index = 0;
  for (std::size_t d = radix.size(); d-- > 0;) index = index * radix[d] + digits[d];
  return index;
}

// Phi(1 - sum_path S_n dgamma_n) = Psi(S, gamma) for plain expected utility.
double psi(const ScenarioTree& tree, const ScalarUtility& u, const std::vector<double>& probs,
           const std::vector<double>& s, const std::vector<double>& dgamma) {
  double total = 0.0;
  for (std::size_t l = 0; l < probs.size(); ++l) {
    double w = 1.0;
    for (NodeIndex n : tree.path(l)) {
      w -= s[static_cast<std::size_t>(n)] * dgamma[static_cast<std::size_t>(n)];
    }
    const double v = u.value(w);
    if (std::isinf(v)) return -kInf;
    total += probs[l] * v;
  }
  return total;
}

std::vector<double> increments(const ScenarioTree& tree, const Strategy& s) {
  std::vector<double> d(tree.size());
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    d[static_cast<std::size_t>(i)] = s.increment(tree, i);
  }
  return d;
}

Strategy strategy_at(const ScenarioTree& tree, const Grids& g, const std::vector<std::size_t>& digits) {
  Strategy s = Strategy::zero(tree);
  for (std::size_t k = 0; k < g.hold_nodes.size(); ++k) s.gamma[g.hold_nodes[k]] = g.gamma_values[digits[k]];
  return s;
}

void require_plain(const PrimalProblem& problem) {
  if (problem.phi.banach_weight != 0.0) {
    throw ConfigurationError("grid verification needs a plain expected-utility functional");
  }
  problem.market.validate(problem.tree);
}

unsigned workers(const GridSpec& spec) { return spec.threads > 0 ? spec.threads : thread_count(); }

// |f(neighbour) - f(center)| summed over coordinates, using the larger side per coordinate.
double local_variation(const std::vector<double>& f, std::size_t center,
                       const std::vector<std::size_t>& radix) {
  std::vector<std::size_t> digits(radix.size());
  decode(center, radix, digits);
  const double fc = f[center];
  double total = 0.0;
  for (std::size_t d = 0; d < radix.size(); ++d) {
    double side = 0.0;
    for (int dir : {-1, 1}) {
      if (dir < 0 && digits[d] == 0) continue;
      if (dir > 0 && digits[d] + 1 >= radix[d]) continue;
      auto nb = digits;
      nb[d] = dir < 0 ? nb[d] - 1 : nb[d] + 1;
      const double fn = f[encode(nb, radix)];
      if (std::isfinite(fn) && std::isfinite(fc)) side = std::max(side, std::abs(fn - fc));
    }
    total += side;
  }
  return total;
}

}  // namespace

double minimax_cost(const PrimalProblem& problem, const GridSpec& grids) {
  const Grids g = make_grids(problem, grids);
  return g.gamma_size * g.s_size + g.s_size;
}

MinimaxReport brute_force_minimax(const PrimalProblem& problem, const GridSpec& spec) {
  require_plain(problem);
  const auto& tree = problem.tree;
  const Grids g = make_grids(problem, spec);
  const double cost = g.gamma_size * g.s_size + g.s_size;
  if (cost > spec.budget) throw BudgetExceeded(cost, spec.budget);

  const ScalarUtility& u = problem.phi.scalar;
  const std::vector<double> probs = tree.leaf_probabilities();
  std::vector<std::size_t> s_radix;
  for (const auto& v : g.s_values) s_radix.push_back(v.size());
  const std::vector<std::size_t> g_radix(g.hold_nodes.size(), g.gamma_values.size());
  const auto n_s = static_cast<std::size_t>(g.s_size);
  const auto n_g = static_cast<std::size_t>(g.gamma_size);
  const unsigned nw = workers(spec);

  MinimaxReport rep;
  rep.evaluations = cost;

  // sup over gamma of inf over S
  std::vector<double> inner(n_g);
  std::vector<double> identity(nw, 0.0);
  parallel_blocks(n_g, nw, [&](std::size_t begin, std::size_t end, unsigned w) {
    std::vector<std::size_t> gd(g_radix.size());
    std::vector<std::size_t> sd(s_radix.size());
    std::vector<double> s(tree.size());
    for (std::size_t gi = begin; gi < end; ++gi) {
      decode(gi, g_radix, gd);
      const Strategy strat = strategy_at(tree, g, gd);
      const std::vector<double> dg = increments(tree, strat);
      double lo = kInf;
      for (std::size_t si = 0; si < n_s; ++si) {
        decode(si, s_radix, sd);
        for (std::size_t n = 0; n < s.size(); ++n) s[n] = g.s_values[n][sd[n]];
        lo = std::min(lo, psi(tree, u, probs, s, dg));
      }
      inner[gi] = lo;
      const double direct = evaluate(problem.phi, terminal_wealth(tree, problem.market, strat), tree);
      double err = 0.0;
      if (std::isfinite(lo) && std::isfinite(direct)) err = std::abs(lo - direct);
      else if (std::isfinite(lo) != std::isfinite(direct)) err = kInf;
      identity[w] = std::max(identity[w], err);
    }
  });
  std::size_t best_g = 0;
  for (std::size_t gi = 1; gi < n_g; ++gi) {
    if (inner[gi] > inner[best_g]) best_g = gi;
  }
  rep.supinf = inner[best_g];
  rep.identity_error = *std::max_element(identity.begin(), identity.end());
  {
    std::vector<std::size_t> gd(g_radix.size());
    decode(best_g, g_radix, gd);
    rep.argmax_gamma = strategy_at(tree, g, gd);
  }
  rep.tol_supinf = local_variation(inner, best_g, g_radix);

  // inf over S of sup over gamma (frictionless solver)
  std::vector<double> mu(n_s);
  parallel_blocks(n_s, nw, [&](std::size_t begin, std::size_t end, unsigned) {
    std::vector<std::size_t> sd(s_radix.size());
    AdaptedProcess price = AdaptedProcess::full(tree);
    for (std::size_t si = begin; si < end; ++si) {
      decode(si, s_radix, sd);
      for (NodeIndex n = 0; n < static_cast<NodeIndex>(tree.size()); ++n) {
        price[n] = g.s_values[static_cast<std::size_t>(n)][sd[static_cast<std::size_t>(n)]];
      }
      const PrimalSolution sol =
          solve_frictionless(tree, price, problem.phi, problem.constraints, problem.options);
      mu[si] = sol.status == SolveStatus::unbounded ? kInf : sol.lambda;
    }
  });
  std::size_t best_s = 0;
  for (std::size_t si = 1; si < n_s; ++si) {
    if (mu[si] < mu[best_s]) best_s = si;
  }
  rep.infsup = mu[best_s];
  rep.argmin_s = AdaptedProcess::full(tree);
  {
    std::vector<std::size_t> sd(s_radix.size());
    decode(best_s, s_radix, sd);
    for (NodeIndex n = 0; n < static_cast<NodeIndex>(tree.size()); ++n) {
      rep.argmin_s[n] = g.s_values[static_cast<std::size_t>(n)][sd[static_cast<std::size_t>(n)]];
    }
  }
  rep.tol_infsup = local_variation(mu, best_s, s_radix);
  rep.tolerance = std::max(rep.tol_supinf, rep.tol_infsup);
  rep.lambda = solve_primal(problem).lambda;
  return rep;
}

SaddleEquivalenceReport check_saddle_equivalence(const PrimalProblem& problem,
                                                 const AdaptedProcess& s_star,
                                                 const Strategy& gamma_star, const GridSpec& spec,
                                                 double tol) {
  require_plain(problem);
  const auto& tree = problem.tree;
  require_coverage(tree, s_star, 0, tree.horizon(), "candidate price");
  const Grids g = make_grids(problem, spec);
  const double cost = g.gamma_size + g.s_size;
  if (cost > spec.budget) throw BudgetExceeded(cost, spec.budget);

  const ScalarUtility& u = problem.phi.scalar;
  const std::vector<double> probs = tree.leaf_probabilities();
  std::vector<double> s_star_v(s_star.values().begin(), s_star.values().end());
  const std::vector<double> dg_star = increments(tree, gamma_star);

  SaddleEquivalenceReport rep;
  rep.tol = tol;
  rep.lambda = solve_primal(problem).lambda;
  rep.phi_gamma = primal_objective(problem, gamma_star);
  const PrimalSolution fl = solve_frictionless(tree, s_star, problem.phi, problem.constraints, problem.options);
  rep.mu = fl.status == SolveStatus::unbounded ? kInf : fl.lambda;
  rep.value = psi(tree, u, probs, s_star_v, dg_star);

  const std::vector<std::size_t> g_radix(g.hold_nodes.size(), g.gamma_values.size());
  std::vector<std::size_t> s_radix;
  for (const auto& v : g.s_values) s_radix.push_back(v.size());
  const unsigned nw = workers(spec);

  std::vector<double> left(nw, 0.0);
  parallel_blocks(static_cast<std::size_t>(g.gamma_size), nw,
                  [&](std::size_t begin, std::size_t end, unsigned w) {
                    std::vector<std::size_t> gd(g_radix.size());
                    for (std::size_t gi = begin; gi < end; ++gi) {
                      decode(gi, g_radix, gd);
                      const auto dg = increments(tree, strategy_at(tree, g, gd));
                      left[w] = std::max(left[w], psi(tree, u, probs, s_star_v, dg) - rep.value);
                    }
                  });
  std::vector<double> right(nw, 0.0);
  parallel_blocks(static_cast<std::size_t>(g.s_size), nw,
                  [&](std::size_t begin, std::size_t end, unsigned w) {
                    std::vector<std::size_t> sd(s_radix.size());
                    std::vector<double> s(tree.size());
                    for (std::size_t si = begin; si < end; ++si) {
                      decode(si, s_radix, sd);
                      for (std::size_t n = 0; n < s.size(); ++n) s[n] = g.s_values[n][sd[n]];
                      right[w] = std::max(right[w], rep.value - psi(tree, u, probs, s, dg_star));
                    }
                  });
  rep.left_violation = *std::max_element(left.begin(), left.end());
  rep.right_violation = *std::max_element(right.begin(), right.end());
  if (!std::isfinite(rep.value)) rep.left_violation = rep.right_violation = kInf;

  rep.saddle_holds = rep.left_violation <= tol && rep.right_violation <= tol;
  rep.gamma_optimal = std::abs(rep.phi_gamma - rep.lambda) <= tol;
  rep.shadow = std::isfinite(rep.mu) && std::abs(rep.mu - rep.lambda) <= tol;
  rep.forward_ok = !(rep.gamma_optimal && rep.shadow) || rep.saddle_holds;
  rep.backward_ok = !rep.saddle_holds || (rep.gamma_optimal && rep.shadow);
  return rep;
}

}  // namespace shadowprice
