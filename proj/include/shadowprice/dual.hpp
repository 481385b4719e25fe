#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shadowprice/primal.hpp"

namespace shadowprice {

/// Pair of P-martingales (Z1, Z2) with bid Z1 <= Z2 <= ask Z1 node-wise.
/// Z3 = Z2 - bid Z1 and Z4 = ask Z1 - Z2 are the spread slacks.
struct DualVariable {
  AdaptedProcess z1;
  AdaptedProcess z2;

  double z3(const BidAskModel& m, NodeIndex i) const { return z2[i] - m.bid[i] * z1[i]; }
  double z4(const BidAskModel& m, NodeIndex i) const { return m.ask[i] * z1[i] - z2[i]; }
};

/// E[V(Z1_T) - Z1_T]. Bounded above by -lambda for every feasible Z.
double dual_objective(const PrimalProblem& problem, const DualVariable& z);

struct DualFeasibility {
  double martingale_violation = 0.0;  // worst |E(Z_{t+1} - Z_t | F_t)| over Z1 and Z2
  double spread_violation = 0.0;      // worst violation of bid Z1 <= Z2 <= ask Z1
  double min_z1 = 0.0;
};
DualFeasibility check_dual(const PrimalProblem& problem, const DualVariable& z);

struct DualSolution {
  SolveStatus status = SolveStatus::optimal;
  double value = 0.0;  // equals -lambda at the optimum
  DualVariable z;
  double strict_margin = 0.0;  // smallest slack of the strictly feasible start
  KktResiduals residuals;
  std::string message;
};

/// Maximizes the dual objective over martingale pairs. Rejects problems with
/// finite holdings bounds (their multipliers are not modelled here).
DualSolution solve_dual(const PrimalProblem& problem);

struct ShadowPriceExtraction {
  AdaptedProcess s_star;
  /// Nodes where Z1 vanishes; the price there is set to the spread midpoint.
  std::vector<NodeIndex> degenerate_nodes;
};

/// S* = Z2 / Z1 clipped into [bid, ask]. Throws ModelError when Z1 = 0 < Z2.
ShadowPriceExtraction extract_shadow_price(const ScenarioTree& tree, const BidAskModel& market,
                                           const DualVariable& z);

struct SlacknessEntry {
  NodeIndex node = kRoot;
  double increment = 0.0;  // dgamma* at the node
  std::string side;        // "buy", "sell" or "none"
  double s_star = 0.0;
  double bid = 0.0;
  double ask = 0.0;
  double deviation = 0.0;  // distance of S* from the price the trade requires
  bool ok = true;
};

struct VerifyOptions {
  double tol_gap = 1e-6;     // |lambda - mu(S*)|
  double active = 1e-5;      // |dgamma*| above which a trade counts as active
  double tol_slackness = 1e-5;
};

struct ShadowPriceCertificate {
  AdaptedProcess s_star;
  double lambda = 0.0;
  double mu = 0.0;  // frictionless value at S*; +inf if unbounded
  double gap = 0.0;
  SolveStatus primal_status = SolveStatus::optimal;
  SolveStatus frictionless_status = SolveStatus::optimal;
  bool within_spread = true;
  std::vector<NodeIndex> outside_spread;
  std::vector<SlacknessEntry> slackness;
  std::vector<NodeIndex> degenerate_nodes;
  /// Set when S* admits arbitrage; the certificate is a strategy.
  std::optional<ArbitrageReport> arbitrage;
  /// Frictionless value at S* with the truncation bounds also imposed.
  std::optional<double> constrained_mu;
  Strategy gamma_star;
  VerifyOptions options;
  bool passed = false;
};

/// Compares lambda with the frictionless value at the candidate price and checks
/// that active trades happen at the candidate's bid or ask.
ShadowPriceCertificate verify_shadow(const PrimalProblem& problem, const AdaptedProcess& s_star,
                                     const VerifyOptions& options = {});

}  // namespace shadowprice
