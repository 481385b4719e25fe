#pragma once

#include <string>
#include <vector>

#include "shadowprice/primal.hpp"
#include "shadowprice/tree.hpp"

namespace fixtures {

using namespace shadowprice;

// One period: root "r" and leaves "u" (prob pu), "d".
inline ScenarioTree one_period(double pu) {
  return ScenarioTree::build(1, {{"r", 0, "", 1.0}, {"u", 1, "r", pu}, {"d", 1, "r", 1.0 - pu}});
}

// Two periods, binary branching with conditional up-probability q.
inline ScenarioTree two_period(double q) {
  return ScenarioTree::build(2, {{"r", 0, "", 1.0},
                                 {"u", 1, "r", q},
                                 {"d", 1, "r", 1.0 - q},
                                 {"uu", 2, "u", q * q},
                                 {"ud", 2, "u", q * (1.0 - q)},
                                 {"du", 2, "d", (1.0 - q) * q},
                                 {"dd", 2, "d", (1.0 - q) * (1.0 - q)}});
}

inline AdaptedProcess process(const ScenarioTree& tree, const std::vector<std::pair<std::string, double>>& v) {
  AdaptedProcess p = AdaptedProcess::full(tree, 0.0);
  for (const auto& [id, x] : v) p[tree.find(id)] = x;
  return p;
}

inline PrimalProblem problem(const ScenarioTree& tree, const AdaptedProcess& bid,
                             const AdaptedProcess& ask, ScalarUtility u = ScalarUtility::log()) {
  PrimalProblem p{tree, {bid, ask}, {u, 0.0}, {}, {}, {}};
  return p;
}

}  // namespace fixtures
