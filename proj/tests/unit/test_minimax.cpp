#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "shadowprice/dual.hpp"
#include "shadowprice/errors.hpp"
#include "shadowprice/minimax.hpp"

using namespace shadowprice;

namespace {

PrimalProblem two_leaf(double bid0, double ask0, double up, double down) {
  auto tree = fixtures::one_period(0.5);
  auto bid = fixtures::process(tree, {{"r", bid0}, {"u", up}, {"d", down}});
  auto ask = fixtures::process(tree, {{"r", ask0}, {"u", up * 1.05}, {"d", down * 1.05}});
  return fixtures::problem(tree, bid, ask);
}

GridSpec fine_grid() {
  GridSpec g;
  g.s_points = 9;
  g.gamma_lo = -3.0;
  g.gamma_hi = 3.0;
  g.gamma_step = 0.005;
  return g;
}

}  // namespace

TEST(Minimax, TwoLeafValuesAgreeWithLambda) {
  auto prob = two_leaf(1.0, 1.04, 1.3, 0.8);
  auto rep = brute_force_minimax(prob, fine_grid());
  EXPECT_LE(rep.supinf, rep.infsup + 1e-12);
  EXPECT_LE(std::abs(rep.supinf - rep.lambda), rep.tolerance + 1e-12);
  EXPECT_LE(std::abs(rep.infsup - rep.lambda), rep.tolerance + 1e-12);
  EXPECT_LE(rep.identity_error, 1e-10);
  EXPECT_LT(rep.tolerance, 5e-3);
}

TEST(Minimax, ZeroSpreadCollapsesToFrictionless) {
  auto tree = fixtures::one_period(0.4);
  auto s = fixtures::process(tree, {{"r", 1.0}, {"u", 1.2}, {"d", 0.9}});
  auto prob = fixtures::problem(tree, s, s);
  auto rep = brute_force_minimax(prob, fine_grid());
  const double mu = solve_frictionless(tree, s, prob.phi, {}).lambda;
  EXPECT_NEAR(rep.infsup, mu, 1e-9);
  EXPECT_NEAR(rep.lambda, mu, 1e-9);
  EXPECT_LE(mu - rep.supinf, rep.tolerance + 1e-12);
  EXPECT_EQ(rep.argmin_s[tree.find("r")], 1.0);
}

TEST(Minimax, BudgetIsEnforcedUpFront) {
  auto prob = two_leaf(1.0, 1.04, 1.3, 0.8);
  GridSpec g = fine_grid();
  g.budget = 1000.0;
  try {
    brute_force_minimax(prob, g);
    FAIL();
  } catch (const BudgetExceeded& e) {
    EXPECT_DOUBLE_EQ(e.required(), minimax_cost(prob, g));
  }
}

TEST(Minimax, FinerNestedGridDoesNotRaiseInfSup) {
  auto prob = two_leaf(1.0, 1.06, 1.25, 0.85);
  GridSpec coarse = fine_grid();
  coarse.s_points = 5;
  GridSpec fine = coarse;
  fine.s_points = 2 * coarse.s_points - 1;
  auto a = brute_force_minimax(prob, coarse);
  auto b = brute_force_minimax(prob, fine);
  EXPECT_LE(b.infsup, a.infsup + 1e-12);
  auto gap_a = verify_shadow(prob, a.argmin_s).gap;
  auto gap_b = verify_shadow(prob, b.argmin_s).gap;
  EXPECT_LE(gap_b, gap_a + 1e-9);
}

TEST(Minimax, RejectsBanachTerm) {
  auto prob = two_leaf(1.0, 1.04, 1.3, 0.8);
  prob.phi.banach_weight = 1.0;
  EXPECT_THROW(brute_force_minimax(prob, fine_grid()), ConfigurationError);
}

TEST(SaddleEquivalence, DualPipelineGivesSaddle) {
  auto tree = fixtures::two_period(0.5);
  auto bid = fixtures::process(tree, {{"r", 1.0}, {"u", 1.15}, {"d", 0.85}, {"uu", 1.3},
                                      {"ud", 1.0}, {"du", 1.0}, {"dd", 0.72}});
  auto ask = fixtures::process(tree, {{"r", 1.02}, {"u", 1.2}, {"d", 0.88}, {"uu", 1.36},
                                      {"ud", 1.04}, {"du", 1.04}, {"dd", 0.75}});
  auto prob = fixtures::problem(tree, bid, ask);
  auto dual = solve_dual(prob);
  ASSERT_EQ(dual.status, SolveStatus::optimal);
  auto s_star = extract_shadow_price(tree, prob.market, dual.z).s_star;
  auto primal = solve_primal(prob);

  GridSpec g;
  g.s_points = 3;
  g.gamma_lo = -4.0;
  g.gamma_hi = 4.0;
  g.gamma_step = 0.1;
  auto rep = check_saddle_equivalence(prob, s_star, primal.gamma_star, g, 1e-6);
  EXPECT_TRUE(rep.saddle_holds) << rep.left_violation << " " << rep.right_violation;
  EXPECT_TRUE(rep.gamma_optimal);
  EXPECT_TRUE(rep.shadow);
  EXPECT_TRUE(rep.forward_ok);
  EXPECT_TRUE(rep.backward_ok);

  // a perturbed strategy loses the left inequality
  Strategy worse = primal.gamma_star;
  worse.gamma[tree.find("r")] += 0.5;
  auto left = check_saddle_equivalence(prob, s_star, worse, g, 1e-6);
  EXPECT_GT(left.left_violation, 1e-6);
  EXPECT_FALSE(left.saddle_holds);
  EXPECT_TRUE(left.backward_ok);
}

TEST(SaddleEquivalence, AskAtSellNodeBreaksRightInequality) {
  auto prob = two_leaf(1.0, 1.04, 1.05, 0.8);  // falling market: short at time 0
  auto primal = solve_primal(prob);
  const NodeIndex r = prob.tree.find("r");
  ASSERT_LT(primal.gamma_star.gamma[r], -1e-3);
  AdaptedProcess s = prob.market.ask;
  auto rep = check_saddle_equivalence(prob, s, primal.gamma_star, fine_grid(), 1e-6);
  EXPECT_GT(rep.right_violation, 1e-6);
  EXPECT_FALSE(rep.saddle_holds);
}
