#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "shadowprice/dual.hpp"
#include "shadowprice/errors.hpp"
#include "shadowprice/random_instances.hpp"

using namespace shadowprice;

TEST(Dual, StrongDualityOnRandomTrees) {
  std::mt19937_64 rng(20240611);
  for (int k = 0; k < 30; ++k) {
    auto prob = random_problem(rng);
    auto primal = solve_primal(prob);
    auto dual = solve_dual(prob);
    ASSERT_EQ(primal.status, SolveStatus::optimal) << "instance " << k;
    ASSERT_EQ(dual.status, SolveStatus::optimal) << "instance " << k;
    EXPECT_NEAR(dual.value, -primal.lambda, 1e-6) << "instance " << k;
    auto feas = check_dual(prob, dual.z);
    EXPECT_LT(feas.martingale_violation, 1e-10);
    EXPECT_LT(feas.spread_violation, 1e-10);
    EXPECT_GT(feas.min_z1, 0.0);
  }
}

TEST(Dual, WeakDualityForOtherFeasiblePairs) {
  // any consistent price system with a deflator gives a feasible pair
  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    auto prob = random_problem(rng);
    auto dual = solve_dual(prob);
    ASSERT_EQ(dual.status, SolveStatus::optimal);
    auto s = extract_shadow_price(prob.tree, prob.market, dual.z).s_star;
    auto rep = detect_arbitrage(prob.tree, s);
    ASSERT_FALSE(rep.arbitrage);
    const auto& z1 = *rep.deflator;
    for (double scale : {0.5, 1.0, 2.0}) {
      DualVariable z{AdaptedProcess::full(prob.tree), AdaptedProcess::full(prob.tree)};
      for (NodeIndex i = 0; i < static_cast<NodeIndex>(prob.tree.size()); ++i) {
        z.z1[i] = scale * z1[i];
        z.z2[i] = scale * z1[i] * s[i];
      }
      EXPECT_LE(dual_objective(prob, z), dual.value + 1e-9);
    }
  }
}

TEST(Dual, ExtractedPriceIsShadowPrice) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 15; ++k) {
    auto prob = random_problem(rng);
    auto dual = solve_dual(prob);
    auto ex = extract_shadow_price(prob.tree, prob.market, dual.z);
    auto cert = verify_shadow(prob, ex.s_star);
    EXPECT_TRUE(cert.within_spread);
    EXPECT_LT(cert.gap, 1e-6) << "instance " << k;
    AdaptedProcess zs = AdaptedProcess::full(prob.tree);
    for (NodeIndex i = 0; i < static_cast<NodeIndex>(prob.tree.size()); ++i) zs[i] = dual.z.z1[i] * ex.s_star[i];
    EXPECT_TRUE(is_martingale(prob.tree, zs, 1e-9).is_martingale);
  }
}

TEST(Dual, LinearUtilityValue) {
  auto tree = fixtures::one_period(0.5);
  auto bid = fixtures::process(tree, {{"r", 0.95}, {"u", 1.1}, {"d", 0.8}});
  auto ask = fixtures::process(tree, {{"r", 1.05}, {"u", 1.2}, {"d", 0.9}});
  auto dual = solve_dual(fixtures::problem(tree, bid, ask, ScalarUtility::linear()));
  ASSERT_EQ(dual.status, SolveStatus::optimal);
  EXPECT_DOUBLE_EQ(dual.value, -1.0);
  auto primal = solve_primal(fixtures::problem(tree, bid, ask, ScalarUtility::linear()));
  EXPECT_NEAR(primal.lambda, 1.0, 1e-8);
}

TEST(Dual, InfeasibleWithoutConsistentPrices) {
  auto tree = fixtures::one_period(0.5);
  auto bid = fixtures::process(tree, {{"r", 0.95}, {"u", 1.2}, {"d", 1.1}});
  auto ask = fixtures::process(tree, {{"r", 1.0}, {"u", 1.3}, {"d", 1.2}});
  auto dual = solve_dual(fixtures::problem(tree, bid, ask));
  EXPECT_EQ(dual.status, SolveStatus::infeasible);
  EXPECT_EQ(solve_primal(fixtures::problem(tree, bid, ask)).status, SolveStatus::unbounded);
}

TEST(Dual, RejectsFiniteBounds) {
  auto tree = fixtures::one_period(0.5);
  auto s = fixtures::process(tree, {{"r", 1.0}, {"u", 1.2}, {"d", 0.9}});
  auto prob = fixtures::problem(tree, s, s);
  prob.constraints.set(tree.find("r"), {-1.0, 1.0});
  EXPECT_THROW(solve_dual(prob), ConfigurationError);
}

TEST(Dual, DegenerateNodes) {
  auto tree = fixtures::one_period(0.5);
  auto bid = fixtures::process(tree, {{"r", 0.9}, {"u", 1.0}, {"d", 0.8}});
  auto ask = fixtures::process(tree, {{"r", 1.1}, {"u", 1.2}, {"d", 0.9}});
  DualVariable z{fixtures::process(tree, {{"r", 0.5}, {"u", 1.0}, {"d", 0.0}}),
                 fixtures::process(tree, {{"r", 0.55}, {"u", 1.1}, {"d", 0.0}})};
  auto ex = extract_shadow_price(tree, {bid, ask}, z);
  ASSERT_EQ(ex.degenerate_nodes.size(), 1u);
  EXPECT_EQ(tree.node(ex.degenerate_nodes[0]).id, "d");
  EXPECT_DOUBLE_EQ(ex.s_star[tree.find("d")], 0.85);
  EXPECT_DOUBLE_EQ(ex.s_star[tree.find("u")], 1.1);
  z.z2[tree.find("d")] = 0.1;
  EXPECT_THROW(extract_shadow_price(tree, {bid, ask}, z), ModelError);
}

TEST(Verify, ComplementarySlacknessOnActiveTrades) {
  auto tree = fixtures::one_period(0.6);
  auto bid = fixtures::process(tree, {{"r", 0.98}, {"u", 1.2}, {"d", 0.9}});
  auto ask = fixtures::process(tree, {{"r", 1.02}, {"u", 1.2}, {"d", 0.9}});
  auto prob = fixtures::problem(tree, bid, ask);
  // buying is optimal, so the shadow price at time 0 is the ask
  auto good = verify_shadow(prob, ask);
  EXPECT_TRUE(good.passed);
  EXPECT_LT(good.gap, 1e-8);
  auto bad = verify_shadow(prob, bid);
  EXPECT_FALSE(bad.passed);
  bool flagged = false;
  for (const auto& e : bad.slackness) flagged = flagged || (!e.ok && e.side == "buy");
  EXPECT_TRUE(flagged);
}
