#include <gtest/gtest.h>

#include <cmath>

#include "shadowprice/dual.hpp"
#include "shadowprice/errors.hpp"
#include "shadowprice/examples.hpp"

using namespace shadowprice;

namespace {

// Maximizer of the per-atom term by bisection on its derivative, independent of
// the closed form used by the builder.
double atom_oracle(int n, int k) {
  const double p = std::ldexp(1.0, -n - k);
  auto d = [&](double g) { return -(1.0 - p) / (1.0 - g) + p * (1.0 + k) / (1.0 + (1.0 + k) * g); };
  double lo = -1.0 / (1.0 + k) + 1e-15, hi = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (d(mid) > 0.0 ? lo : hi) = mid;
  }
  const double g = 0.5 * (lo + hi);
  return (1.0 - p) * std::log(1.0 - g) + p * std::log(1.0 + (1.0 + k) * g);
}

double example5_oracle(int n, int K) {
  double mass = 0.0, total = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double pd = k == 0 ? 1.0 - std::ldexp(1.0, -n) : std::ldexp(1.0, -n - k);
    mass += pd;
    total += pd * atom_oracle(n, k);
  }
  return total / mass;
}

ExampleInstance make(ExampleName which, int n = 8, int K = 6, int N = 10) {
  ExampleDescriptor d;
  d.which = which;
  d.n = n;
  d.K = K;
  d.N = N;
  return build_example(d);
}

}  // namespace

TEST(Example4, ConditionalMeanIsTwoOnEveryAtom) {
  auto inst = make(ExampleName::example4);
  const auto& tree = inst.problem->tree;
  RandomVariable s1;
  for (NodeIndex leaf : tree.leaves()) s1.values.push_back(inst.problem->market.bid[leaf]);
  auto e = conditional_expectation(tree, s1, 0);
  ASSERT_EQ(tree.layer(0).size(), 10u);
  for (NodeIndex a : tree.layer(0)) EXPECT_NEAR(e[a], 2.0, 1e-12) << tree.node(a).id;
}

TEST(Example4, BanachArithmetic) {
  auto inst = make(ExampleName::example4);
  auto ds = example4_price_sequence().map([](double s) { return s - 2.0; });
  EXPECT_DOUBLE_EQ(banach_limit(ds), 0.5);
  EXPECT_DOUBLE_EQ(banach_limit(AlmostConvergentSequence::combine(1.0, ds, 1.0, ds.shifted())), 1.0);
  const auto& tree = inst.problem->tree;
  auto x = example4_frictionless_wealth(inst, 1.0, 2.0);
  EXPECT_NEAR(evaluate(example4_functional(), x, tree), 1.5, 1e-12);
  auto flat = example4_frictionless_wealth(inst, 0.0, 2.0);
  EXPECT_DOUBLE_EQ(evaluate(example4_functional(), flat, tree), 1.0);
}

TEST(Example4, NoTradeIsOptimal) {
  for (int N : {1, 3, 10}) {
    auto inst = make(ExampleName::example4, 8, 6, N);
    auto sol = solve_primal(*inst.problem);
    ASSERT_EQ(sol.status, SolveStatus::optimal);
    EXPECT_NEAR(sol.lambda, 1.0, 1e-9);
  }
}

TEST(Example5, LambdaMatchesPerAtomOracle) {
  auto inst = make(ExampleName::example5);
  auto sol = solve_primal(*inst.problem);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.lambda, example5_oracle(8, 6), 1e-8);
  EXPECT_NEAR(inst.expected.values.at("lambda"), example5_oracle(8, 6), 1e-12);
  const auto& tree = inst.problem->tree;
  EXPECT_NEAR(sol.gamma_star.gamma[tree.find("r")], 0.0, 1e-6);
  for (int k = 0; k <= 6; ++k) {
    EXPECT_LT(sol.gamma_star.gamma[tree.find("D" + std::to_string(k))], 0.0);
  }
}

TEST(Example5, CandidateIsOnlyAGeneralizedShadowPrice) {
  auto inst = make(ExampleName::example5);
  const auto& tree = inst.problem->tree;
  auto arb = detect_arbitrage(tree, *inst.candidate);
  EXPECT_TRUE(arb.arbitrage);
  auto cert = verify_shadow(*inst.problem, *inst.candidate);
  EXPECT_EQ(cert.frictionless_status, SolveStatus::unbounded);
  EXPECT_FALSE(cert.passed);
  ASSERT_TRUE(cert.constrained_mu.has_value());
  EXPECT_NEAR(*cert.constrained_mu, example5_oracle(8, 6), 1e-8);
}

TEST(Example5, TruncatedValueGrowsWithK) {
  double prev = -kInf;
  for (int K : {3, 4, 5, 6}) {
    auto inst = make(ExampleName::example5, 8, K);
    const double mass = inst.expected.values.at("truncated_mass");
    const double partial = mass * solve_primal(*inst.problem).lambda;
    EXPECT_GT(partial, prev);
    prev = partial;
  }
}

TEST(Example5, DriftConditionNamesAtom) {
  try {
    make(ExampleName::example5, 1, 3);
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.node_id(), "D0");
  }
}

TEST(Example3, QuadratureModelHasLongSaddle) {
  ExampleDescriptor d;
  d.which = ExampleName::example3;
  d.quad = 32;
  auto inst = build_example(d);
  ASSERT_TRUE(inst.one_period.has_value());
  auto sp = saddle_point_conditions(*inst.one_period);
  EXPECT_EQ(sp.branch, SaddleBranch::positive);
  SaddleGrid grid{sp.gamma0 - 1.0, sp.gamma0 + 1.0, 200, 200};
  EXPECT_TRUE(verify_saddle(*inst.one_period, sp.gamma0, sp.s1, grid, 1e-8).ok);
}

TEST(Examples, UnknownNameRejected) {
  EXPECT_THROW(example_from_string("example9"), ConfigurationError);
  EXPECT_EQ(example_from_string("example4"), ExampleName::example4);
}
