#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shadowprice/tree.hpp"
#include "shadowprice/utility.hpp"

namespace shadowprice {

struct Bounds {
  double lo = -kInf;
  double hi = kInf;
};

/// Per-node box bounds on gamma_t (t < T). Nodes without an entry are unbounded.
class BoxConstraints {
 public:
  BoxConstraints() = default;

  void set(NodeIndex node, Bounds b) { entries_.emplace_back(node, b); }
  Bounds get(NodeIndex node) const;
  bool empty() const noexcept { return entries_.empty(); }
  /// True when every bound is infinite (or at least `big` in magnitude).
  bool unbounded(double big) const;
  const std::vector<std::pair<NodeIndex, Bounds>>& entries() const noexcept { return entries_; }

  /// Node-wise intersection.
  static BoxConstraints intersect(const BoxConstraints& a, const BoxConstraints& b);

 private:
  std::vector<std::pair<NodeIndex, Bounds>> entries_;
};

struct SolverOptions {
  double tol_kkt = 1e-8;
  double tol_gap = 1e-9;
  int max_iter = 200;               // Newton iterations per barrier centering
  double unbounded_ceiling = 1e12;  // utility units
  double internal_bound = 1e9;      // stands in for infinite holdings bounds
};

/// Utility maximization under bid/ask trading.
///   constraints:        the portfolio set, shared with the frictionless problem
///   truncation_bounds:  extra bounds applied only to the frictional problem; a
///                       truncated infinite model uses them to carry feasibility
///                       restrictions implied by the discarded tail
struct PrimalProblem {
  ScenarioTree tree;
  BidAskModel market;
  UtilityFunctional phi;
  BoxConstraints constraints;
  BoxConstraints truncation_bounds;
  SolverOptions options;
};

/// Per-node beta (bond), gamma (stock), L (sold), M (bought) over t = 0..T.
struct PrimalDecomposition {
  AdaptedProcess beta;
  AdaptedProcess gamma;
  AdaptedProcess sold;
  AdaptedProcess bought;
};

enum class SolveStatus { optimal, unbounded, infeasible, max_iter };
std::string to_string(SolveStatus s);

struct KktResiduals {
  double gap_bound = 0.0;        // barrier duality-gap bound m / t
  double newton_decrement = 0.0;
  double stationarity = 0.0;     // |grad f + G' lambda|_inf at exit
  double wealth_slack = 0.0;     // max |solver wealth - recomputed wealth| over leaves
  int newton_iterations = 0;
};

struct PrimalSolution {
  SolveStatus status = SolveStatus::optimal;
  double lambda = 0.0;  // +inf when unbounded above
  Strategy gamma_star;
  PrimalDecomposition decomposition;
  KktResiduals residuals;
  /// Improving recession direction of holdings when status is unbounded.
  std::optional<Strategy> unbounded_direction;
  std::string message;
};

/// sup Phi(X_T(gamma)) over the box; Phi must carry no Banach term.
PrimalSolution solve_primal(const PrimalProblem& problem);

/// sup Phi(1 + (gamma . S)_T) over the box for an arbitrary adapted price.
PrimalSolution solve_frictionless(const ScenarioTree& tree, const AdaptedProcess& price,
                                  const UtilityFunctional& phi, const BoxConstraints& constraints,
                                  const SolverOptions& options = {});

struct ArbitrageReport {
  bool arbitrage = false;
  /// Holdings with nonnegative, somewhere positive frictionless gain.
  std::optional<Strategy> certificate;
  /// Strictly positive martingale deflator Z with Z * S a martingale, E Z_0 = 1.
  std::optional<AdaptedProcess> deflator;
  double margin = 0.0;  // optimal value of the strict-positivity program
};

/// Frictionless arbitrage test by a linear feasibility program over node measures.
ArbitrageReport detect_arbitrage(const ScenarioTree& tree, const AdaptedProcess& price);

/// Phi(X_T(gamma)) for a plain expected-utility functional.
double primal_objective(const PrimalProblem& problem, const Strategy& gamma);

}  // namespace shadowprice
