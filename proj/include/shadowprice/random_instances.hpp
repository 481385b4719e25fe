#pragma once

#include <cstdint>
#include <random>

#include "shadowprice/primal.hpp"
#include "shadowprice/relaxation.hpp"

namespace shadowprice {

struct RandomTreeOptions {
  int max_horizon = 3;
  std::size_t max_leaves = 24;
  double max_relative_spread = 0.30;
  double zero_spread_chance = 0.1;  // per node
  double max_move = 0.25;           // relative mid-price move per step
};

/// Random bid/ask model around a mid price that is a martingale under a random
/// equivalent measure, so a consistent price system always exists.
/// Utility is log or power with p in {0.3, 0.5, 0.7}.
PrimalProblem random_problem(std::mt19937_64& rng, const RandomTreeOptions& options = {});

/// Random scenario tree only (node ids "n0", "n1", ...).
ScenarioTree random_tree(std::mt19937_64& rng, const RandomTreeOptions& options = {});

/// One trading period, `leaves` terminal nodes, log utility, spreads of 1-15%
/// around a mid price that is a martingale under a random measure.
PrimalProblem random_one_step_problem(std::mt19937_64& rng, std::size_t leaves);

/// Random one-period model with s0 = 1, 2..max_scenarios scenarios, bid1 in
/// [0.6, 1.4] and spread in [0.02, 0.3]. Some scenario lies below s0 at the bid
/// and some above at the ask. Utility is log, power or exponential.
OnePeriodModel random_one_period(std::mt19937_64& rng, std::size_t max_scenarios = 6);

}  // namespace shadowprice
