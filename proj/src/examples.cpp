#include "shadowprice/examples.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "shadowprice/errors.hpp"

namespace shadowprice {

std::string to_string(ExampleName e) {
  switch (e) {
    case ExampleName::example3: return "example3";
    case ExampleName::example4: return "example4";
    case ExampleName::example5: return "example5";
  }
  return "unknown";
}

ExampleName example_from_string(const std::string& name) {
  if (name == "example3") return ExampleName::example3;
  if (name == "example4") return ExampleName::example4;
  if (name == "example5") return ExampleName::example5;
  throw ConfigurationError("unknown example '" + name + "' (expected example3, example4 or example5)");
}

double example5_gamma(int n, int k) {
  const double p = std::ldexp(1.0, -n - k);
  return p - (1.0 - p) / (1.0 + k);
}

double example5_atom_value(int n, int k, double g) {
  const double p = std::ldexp(1.0, -n - k);
  const double a = 1.0 - g;
  const double b = 1.0 + (1.0 + k) * g;
  if (!(a > 0.0) || !(b > 0.0)) return -kInf;
  return (1.0 - p) * std::log(a) + p * std::log(b);
}

AlmostConvergentSequence example4_price_sequence() { return {{}, {1.0, 4.0}}; }

UtilityFunctional example4_functional() { return {ScalarUtility::linear(), 1.0}; }

RandomVariable example4_frictionless_wealth(const ExampleInstance& inst, double gamma0, double s0) {
  if (!inst.problem || inst.descriptor.which != ExampleName::example4) {
    throw ConfigurationError("example4 instance expected");
  }
  const auto& tree = inst.problem->tree;
  const auto& s1 = inst.problem->market.bid;
  RandomVariable rv;
  for (NodeIndex leaf : tree.leaves()) rv.values.push_back(1.0 + gamma0 * (s1[leaf] - s0));
  rv.tail = example4_price_sequence().map([&](double s) { return 1.0 + gamma0 * (s - s0); });
  return rv;
}

namespace {

ExampleInstance build_example3(const ExampleDescriptor& d) {
  if (d.quad < 2) throw ConfigurationError("example3 needs quad >= 2");
  ExampleInstance inst;
  inst.descriptor = d;
  OnePeriodModel m;
  m.s0 = 1.0;
  m.u = ScalarUtility::log();
  const double alpha = 0.05;
  const double w = 1.0 / d.quad;
  // midpoint rule on [0, 1] with uniform weights
  for (int i = 0; i < d.quad; ++i) {
    const double omega = (i + 0.5) * w;
    const double bid = 0.8 + 0.5 * omega;
    m.scenarios.push_back({w, bid, bid + alpha + 0.1 * omega});
  }
  m.validate();
  inst.one_period = m;
  inst.expected.values["s0"] = m.s0;
  inst.expected.values["spread_floor"] = alpha;
  inst.expected.notes["profile"] = "bid1 = 0.8 + 0.5 w, ask1 = bid1 + 0.05 + 0.1 w, w uniform on [0, 1]";
  return inst;
}

ExampleInstance build_example4(const ExampleDescriptor& d) {
  if (d.N < 1) throw ConfigurationError("example4 needs N >= 1");
  ExampleInstance inst;
  inst.descriptor = d;
  const double mass = 1.0 - std::ldexp(1.0, -2 * d.N);
  std::vector<NodeSpec> specs;
  for (int a = 1; a <= d.N; ++a) {
    const double p = (std::ldexp(1.0, -(2 * a - 1)) + std::ldexp(1.0, -2 * a)) / mass;
    specs.push_back({"D" + std::to_string(a), 0, "", p});
  }
  for (int w = 1; w <= 2 * d.N; ++w) {
    const int atom = (w + 1) / 2;
    specs.push_back({"w" + std::to_string(w), 1, "D" + std::to_string(atom), std::ldexp(1.0, -w) / mass});
  }
  ScenarioTree tree = ScenarioTree::build(1, specs);
  BidAskModel market{AdaptedProcess::full(tree), AdaptedProcess::full(tree)};
  for (NodeIndex i : tree.layer(0)) {
    market.bid[i] = 1.0;
    market.ask[i] = 4.0;
  }
  for (NodeIndex leaf : tree.leaves()) {
    const int w = std::stoi(tree.node(leaf).id.substr(1));
    const double s = w % 2 == 1 ? 1.0 : 4.0;
    market.bid[leaf] = s;
    market.ask[leaf] = s;
  }
  market.validate(tree);
  // the solver handles the expectation part; the Banach term is checked separately
  inst.problem = PrimalProblem{tree, market, {ScalarUtility::linear(), 0.0}, {}, {}, {}};
  AdaptedProcess cand = AdaptedProcess::full(tree);
  for (NodeIndex i : tree.layer(0)) cand[i] = 2.0;
  for (NodeIndex leaf : tree.leaves()) cand[leaf] = market.bid[leaf];
  inst.candidate = cand;
  inst.expected.values["conditional_mean"] = 2.0;
  inst.expected.values["banach_limit_increment"] = 0.5;
  inst.expected.values["phi_frictionless"] = 1.5;
  inst.expected.values["lambda"] = 1.0;
  inst.expected.notes["candidate"] = "S0 = 2 on every atom; a generalized shadow price but not a shadow price";
  return inst;
}

ExampleInstance build_example5(const ExampleDescriptor& d) {
  if (d.n < 1 || d.K < 0) throw ConfigurationError("example5 needs n >= 1 and K >= 0");
  ExampleInstance inst;
  inst.descriptor = d;
  for (int k = 0; k <= d.K; ++k) {
    const double p = std::ldexp(1.0, -d.n - k);
    const double drift = -(1.0 - p) + p * (1.0 + k);
    if (!(drift < 0.0)) {
      throw ModelError("conditional drift of ask2 - bid1 is not negative; increase n",
                       "D" + std::to_string(k));
    }
  }
  std::vector<double> atom_p;
  double mass = 0.0;
  for (int k = 0; k <= d.K; ++k) {
    atom_p.push_back(k == 0 ? 1.0 - std::ldexp(1.0, -d.n) : std::ldexp(1.0, -d.n - k));
    mass += atom_p.back();
  }
  std::vector<NodeSpec> specs;
  specs.push_back({"r", 0, "", 1.0});
  for (int k = 0; k <= d.K; ++k) {
    specs.push_back({"D" + std::to_string(k), 1, "r", atom_p[static_cast<std::size_t>(k)] / mass});
  }
  for (int k = 0; k <= d.K; ++k) {
    const double pd = atom_p[static_cast<std::size_t>(k)] / mass;
    const double p = std::ldexp(1.0, -d.n - k);
    const std::string parent = "D" + std::to_string(k);
    specs.push_back({"w" + std::to_string(2 * k + 1), 2, parent, (1.0 - p) * pd});
    specs.push_back({"w" + std::to_string(2 * k + 2), 2, parent, p * pd});
  }
  ScenarioTree tree = ScenarioTree::build(2, specs);
  BidAskModel market{AdaptedProcess::full(tree), AdaptedProcess::full(tree)};
  const NodeIndex root = tree.find("r");
  market.bid[root] = 3.0;
  market.ask[root] = 3.0;
  for (int k = 0; k <= d.K; ++k) {
    const NodeIndex a = tree.find("D" + std::to_string(k));
    market.bid[a] = 2.0;
    market.ask[a] = 2.0 + k;
    const NodeIndex odd = tree.find("w" + std::to_string(2 * k + 1));
    const NodeIndex even = tree.find("w" + std::to_string(2 * k + 2));
    market.bid[odd] = 1.0;
    market.ask[odd] = 1.0;
    market.bid[even] = 1.0;
    market.ask[even] = 3.0 + k;
  }
  market.validate(tree);

  // In the untruncated model any short position at time 0 is ruined on a far
  // atom, so the truncated model keeps that restriction explicitly.
  BoxConstraints trunc;
  trunc.set(root, {0.0, kInf});
  inst.problem = PrimalProblem{tree, market, {ScalarUtility::log(), 0.0}, {}, trunc, {}};

  AdaptedProcess cand = AdaptedProcess::full(tree);
  cand[root] = 3.0;
  for (int k = 0; k <= d.K; ++k) cand[tree.find("D" + std::to_string(k))] = 2.0;
  for (NodeIndex leaf : tree.leaves()) cand[leaf] = market.ask[leaf];
  inst.candidate = cand;

  double lambda = 0.0;
  for (int k = 0; k <= d.K; ++k) {
    lambda += atom_p[static_cast<std::size_t>(k)] / mass * example5_atom_value(d.n, k, example5_gamma(d.n, k));
  }
  inst.expected.values["lambda"] = lambda;
  inst.expected.values["gamma0"] = 0.0;
  inst.expected.values["truncated_mass"] = mass;
  inst.expected.notes["candidate"] = "S* = (S0, bid1, ask2); frictionless value is unbounded, value with gamma0 >= 0 equals lambda";
  return inst;
}

}  // namespace

ExampleInstance build_example(const ExampleDescriptor& desc) {
  switch (desc.which) {
    case ExampleName::example3: return build_example3(desc);
    case ExampleName::example4: return build_example4(desc);
    case ExampleName::example5: return build_example5(desc);
  }
  throw ConfigurationError("unknown example");
}

}  // namespace shadowprice
