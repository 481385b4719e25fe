#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "shadowprice/errors.hpp"

using namespace shadowprice;

namespace {

// Log-optimal holding for wealth 1 + g a (prob pi) / 1 + g b, from the first-order condition.
double log_binomial_gamma(double pi, double a, double b) { return -(pi * a + (1.0 - pi) * b) / (a * b); }

}  // namespace

TEST(Primal, FrictionlessLogBinomialClosedForm) {
  auto tree = fixtures::one_period(0.6);
  auto s = fixtures::process(tree, {{"r", 1.0}, {"u", 1.2}, {"d", 0.9}});
  auto sol = solve_frictionless(tree, s, {ScalarUtility::log(), 0.0}, {});
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  const double g = log_binomial_gamma(0.6, 0.2, -0.1);
  EXPECT_NEAR(sol.gamma_star.gamma[tree.find("r")], g, 1e-7);
  const double mu = 0.6 * std::log(1 + 0.2 * g) + 0.4 * std::log(1 - 0.1 * g);
  EXPECT_NEAR(sol.lambda, mu, 1e-9);
}

TEST(Primal, BuyingAtTheAsk) {
  auto tree = fixtures::one_period(0.6);
  auto bid = fixtures::process(tree, {{"r", 0.98}, {"u", 1.2}, {"d", 0.9}});
  auto ask = fixtures::process(tree, {{"r", 1.02}, {"u", 1.2}, {"d", 0.9}});
  auto sol = solve_primal(fixtures::problem(tree, bid, ask));
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  const double g = log_binomial_gamma(0.6, 1.2 - 1.02, 0.9 - 1.02);
  ASSERT_GT(g, 0.0);
  EXPECT_NEAR(sol.gamma_star.gamma[tree.find("r")], g, 1e-7);
  EXPECT_NEAR(sol.decomposition.bought[tree.find("r")], g, 1e-7);
  EXPECT_NEAR(sol.decomposition.sold[tree.find("u")], g, 1e-7);
  // beta_T equals terminal wealth
  auto w = terminal_wealth(tree, {bid, ask}, sol.gamma_star);
  EXPECT_NEAR(sol.decomposition.beta[tree.find("u")], w.values[tree.leaf_position(tree.find("u"))], 1e-12);
}

TEST(Primal, NoTradeInsideSpread) {
  auto tree = fixtures::one_period(0.5);
  auto bid = fixtures::process(tree, {{"r", 0.9}, {"u", 1.1}, {"d", 0.9}});
  auto ask = fixtures::process(tree, {{"r", 1.1}, {"u", 1.1}, {"d", 0.9}});
  auto sol = solve_primal(fixtures::problem(tree, bid, ask));
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.gamma_star.gamma[tree.find("r")], 0.0, 1e-7);
  EXPECT_NEAR(sol.lambda, 0.0, 1e-8);
}

TEST(Primal, ArbitrageIsUnbounded) {
  auto tree = fixtures::one_period(0.5);
  auto s = fixtures::process(tree, {{"r", 1.0}, {"u", 1.2}, {"d", 1.0}});
  auto sol = solve_frictionless(tree, s, {ScalarUtility::log(), 0.0}, {});
  EXPECT_EQ(sol.status, SolveStatus::unbounded);
  ASSERT_TRUE(sol.unbounded_direction.has_value());
  EXPECT_GT(sol.unbounded_direction->gamma[tree.find("r")], 0.0);
  EXPECT_TRUE(std::isinf(sol.lambda));

  auto exp_sol = solve_frictionless(tree, s, {ScalarUtility::exponential(1.0), 0.0}, {});
  EXPECT_EQ(exp_sol.status, SolveStatus::unbounded);
  EXPECT_TRUE(std::isnan(exp_sol.lambda));
}

TEST(Primal, BoxBoundBindsAndRemovesUnboundedness) {
  auto tree = fixtures::one_period(0.5);
  auto s = fixtures::process(tree, {{"r", 1.0}, {"u", 1.2}, {"d", 1.0}});
  BoxConstraints box;
  box.set(tree.find("r"), {-1.0, 2.0});
  auto sol = solve_frictionless(tree, s, {ScalarUtility::log(), 0.0}, box);
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.gamma_star.gamma[tree.find("r")], 2.0, 1e-6);
  EXPECT_NEAR(sol.lambda, 0.5 * std::log(1.4), 1e-7);
}

TEST(Primal, LinearUtilityMartingaleIsFlat) {
  auto tree = fixtures::one_period(0.5);
  auto s = fixtures::process(tree, {{"r", 1.0}, {"u", 1.2}, {"d", 0.8}});
  auto sol = solve_frictionless(tree, s, {ScalarUtility::linear(), 0.0}, {});
  ASSERT_EQ(sol.status, SolveStatus::optimal);
  EXPECT_NEAR(sol.lambda, 1.0, 1e-9);
  auto up = fixtures::process(tree, {{"r", 1.0}, {"u", 1.3}, {"d", 0.8}});
  EXPECT_EQ(solve_frictionless(tree, up, {ScalarUtility::linear(), 0.0}, {}).status,
            SolveStatus::unbounded);
}

TEST(Primal, TwoPeriodPowerUtilityMatchesFrictionless) {
  auto tree = fixtures::two_period(0.55);
  auto s = fixtures::process(
      tree, {{"r", 1.0}, {"u", 1.1}, {"d", 0.92}, {"uu", 1.25}, {"ud", 1.0}, {"du", 1.0}, {"dd", 0.85}});
  auto fl = solve_frictionless(tree, s, {ScalarUtility::power(0.5), 0.0}, {});
  auto fr = solve_primal(fixtures::problem(tree, s, s, ScalarUtility::power(0.5)));
  ASSERT_EQ(fl.status, SolveStatus::optimal);
  ASSERT_EQ(fr.status, SolveStatus::optimal);
  EXPECT_NEAR(fl.lambda, fr.lambda, 1e-9);
}

TEST(Primal, BoundsMustContainZero) {
  auto tree = fixtures::one_period(0.5);
  auto s = fixtures::process(tree, {{"r", 1.0}, {"u", 1.2}, {"d", 0.8}});
  BoxConstraints box;
  box.set(tree.find("r"), {0.5, 1.0});
  EXPECT_THROW(solve_frictionless(tree, s, {ScalarUtility::log(), 0.0}, box), ModelError);
}

TEST(Arbitrage, DetectsAndCertifies) {
  auto tree = fixtures::two_period(0.5);
  auto s = fixtures::process(
      tree, {{"r", 1.0}, {"u", 1.1}, {"d", 0.9}, {"uu", 1.2}, {"ud", 1.15}, {"du", 1.0}, {"dd", 0.8}});
  auto rep = detect_arbitrage(tree, s);
  ASSERT_TRUE(rep.arbitrage);
  ASSERT_TRUE(rep.certificate.has_value());
  auto w = frictionless_wealth(tree, s, *rep.certificate);
  double best = 0.0;
  for (double v : w.values) {
    EXPECT_GE(v - 1.0, -1e-14);
    best = std::max(best, v - 1.0);
  }
  EXPECT_GT(best, 0.0);
}

TEST(Arbitrage, DeflatorOnArbitrageFreePrices) {
  auto tree = fixtures::two_period(0.3);
  auto s = fixtures::process(
      tree, {{"r", 1.0}, {"u", 1.1}, {"d", 0.9}, {"uu", 1.2}, {"ud", 1.0}, {"du", 1.0}, {"dd", 0.8}});
  auto rep = detect_arbitrage(tree, s);
  ASSERT_FALSE(rep.arbitrage);
  ASSERT_TRUE(rep.deflator.has_value());
  const auto& z = *rep.deflator;
  AdaptedProcess zs = AdaptedProcess::full(tree);
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    EXPECT_GT(z[i], 0.0);
    zs[i] = z[i] * s[i];
  }
  EXPECT_TRUE(is_martingale(tree, z, 1e-10).is_martingale);
  EXPECT_TRUE(is_martingale(tree, zs, 1e-10).is_martingale);
}
