#include "shadowprice/random_instances.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace shadowprice {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t k) {
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) {
    x = uniform(rng, 0.2, 1.0);
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace

ScenarioTree random_tree(std::mt19937_64& rng, const RandomTreeOptions& options) {
  const int horizon = std::uniform_int_distribution<int>(1, options.max_horizon)(rng);
  std::vector<NodeSpec> specs;
  specs.push_back({"n0", 0, "", 1.0});
  std::vector<std::size_t> frontier{0};
  for (int t = 1; t <= horizon; ++t) {
    // keep the final leaf count within budget: each remaining step branches at least twice
    const std::size_t steps_left = static_cast<std::size_t>(horizon - t);
    std::vector<std::size_t> next;
    for (std::size_t idx = 0; idx < frontier.size(); ++idx) {
      const std::size_t parent = frontier[idx];
      const std::size_t others = frontier.size() - idx - 1;
      const std::size_t reserved = (next.size() + 2 * others) << steps_left;
      std::size_t cap = 3;
      while (cap > 2 && reserved + (cap << steps_left) > options.max_leaves) --cap;
      const auto k = static_cast<std::size_t>(
          std::uniform_int_distribution<int>(2, static_cast<int>(cap))(rng));
      const auto w = random_weights(rng, k);
      const double p_parent = specs[parent].p;
      const std::string pid = specs[parent].id;
      for (std::size_t c = 0; c < k; ++c) {
        specs.push_back({"n" + std::to_string(specs.size()), t, pid, p_parent * w[c]});
        next.push_back(specs.size() - 1);
      }
    }
    frontier = std::move(next);
  }
  return ScenarioTree::build(horizon, specs);
}

PrimalProblem random_problem(std::mt19937_64& rng, const RandomTreeOptions& options) {
  ScenarioTree tree = random_tree(rng, options);
  AdaptedProcess mid = AdaptedProcess::full(tree);
  AdaptedProcess bid = AdaptedProcess::full(tree);
  AdaptedProcess ask = AdaptedProcess::full(tree);
  mid[tree.layer(0)[0]] = uniform(rng, 0.5, 2.0);

  for (NodeIndex n = 0; n < static_cast<NodeIndex>(tree.size()); ++n) {
    const auto& kids = tree.node(n).children;
    if (kids.empty()) continue;
    // martingale under q: subtract the q-mean of the relative moves
    const auto q = random_weights(rng, kids.size());
    std::vector<double> eps(kids.size());
    double mean = 0.0;
    for (std::size_t c = 0; c < kids.size(); ++c) {
      eps[c] = uniform(rng, -options.max_move, options.max_move);
      mean += q[c] * eps[c];
    }
    for (std::size_t c = 0; c < kids.size(); ++c) {
      mid[kids[c]] = mid[n] * (1.0 + eps[c] - mean);
    }
  }
  for (NodeIndex n = 0; n < static_cast<NodeIndex>(tree.size()); ++n) {
    if (uniform(rng, 0.0, 1.0) < options.zero_spread_chance) {
      bid[n] = ask[n] = mid[n];
      continue;
    }
    const double sigma = uniform(rng, 0.0, options.max_relative_spread);
    const double split = uniform(rng, 0.1, 0.9);
    bid[n] = mid[n] * (1.0 - sigma * split);
    ask[n] = mid[n] * (1.0 + sigma * (1.0 - split));
  }

  static const double kPowers[] = {0.3, 0.5, 0.7};
  const int pick = std::uniform_int_distribution<int>(0, 3)(rng);
  ScalarUtility u = pick == 0 ? ScalarUtility::log() : ScalarUtility::power(kPowers[pick - 1]);
  return PrimalProblem{std::move(tree), {bid, ask}, {u, 0.0}, {}, {}, {}};
}

OnePeriodModel random_one_period(std::mt19937_64& rng, std::size_t max_scenarios) {
  const auto m = static_cast<std::size_t>(
      std::uniform_int_distribution<int>(2, static_cast<int>(std::max<std::size_t>(2, max_scenarios)))(rng));
  OnePeriodModel model;
  model.s0 = 1.0;
  static const double kPowers[] = {0.3, 0.5, 0.7};
  static const double kRisk[] = {0.5, 1.0, 2.0};
  const int pick = std::uniform_int_distribution<int>(0, 6)(rng);
  if (pick == 0) model.u = ScalarUtility::log();
  else if (pick <= 3) model.u = ScalarUtility::power(kPowers[pick - 1]);
  else model.u = ScalarUtility::exponential(kRisk[pick - 4]);
  // redraw until some scenario loses at the bid and some gains at the ask
  for (;;) {
    const auto w = random_weights(rng, m);
    model.scenarios.clear();
    bool loss = false;
    bool gain = false;
    for (std::size_t k = 0; k < m; ++k) {
      const double bid = uniform(rng, 0.6, 1.4);
      const double ask = bid + uniform(rng, 0.02, 0.3);
      loss = loss || bid < model.s0;
      gain = gain || ask > model.s0;
      model.scenarios.push_back({w[k], bid, ask});
    }
    if (loss && gain) break;
  }
  // exact normalization of the weights
  double total = 0.0;
  for (const auto& sc : model.scenarios) total += sc.p;
  for (auto& sc : model.scenarios) sc.p /= total;
  return model;
}

PrimalProblem random_one_step_problem(std::mt19937_64& rng, std::size_t leaves) {
  if (leaves < 2) leaves = 2;
  std::vector<NodeSpec> specs{{"n0", 0, "", 1.0}};
  const auto w = random_weights(rng, leaves);
  for (std::size_t c = 0; c < leaves; ++c) specs.push_back({"n" + std::to_string(c + 1), 1, "n0", w[c]});
  ScenarioTree tree = ScenarioTree::build(1, specs);
  AdaptedProcess bid = AdaptedProcess::full(tree);
  AdaptedProcess ask = AdaptedProcess::full(tree);
  const double mid0 = uniform(rng, 0.8, 1.2);
  const auto q = random_weights(rng, leaves);
  std::vector<double> eps(leaves);
  double mean = 0.0;
  for (std::size_t c = 0; c < leaves; ++c) {
    eps[c] = uniform(rng, -0.25, 0.25);
    mean += q[c] * eps[c];
  }
  auto spread = [&](NodeIndex n, double mid) {
    const double sigma = uniform(rng, 0.01, 0.15);
    const double split = uniform(rng, 0.1, 0.9);
    bid[n] = mid * (1.0 - sigma * split);
    ask[n] = mid * (1.0 + sigma * (1.0 - split));
  };
  spread(0, mid0);
  for (std::size_t c = 0; c < leaves; ++c) spread(static_cast<NodeIndex>(c + 1), mid0 * (1.0 + eps[c] - mean));
  return PrimalProblem{std::move(tree), {bid, ask}, {ScalarUtility::log(), 0.0}, {}, {}, {}};
}

}  // namespace shadowprice
