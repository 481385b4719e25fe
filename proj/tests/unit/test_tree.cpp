#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "shadowprice/errors.hpp"

using namespace shadowprice;

TEST(Tree, LayersAndLeafRanges) {
  auto tree = fixtures::two_period(0.3);
  EXPECT_EQ(tree.horizon(), 2);
  EXPECT_EQ(tree.size(), 7u);
  EXPECT_EQ(tree.leaf_count(), 4u);
  auto [first, last] = tree.leaf_range(tree.find("u"));
  EXPECT_EQ(last - first, 2u);
  auto path = tree.path(tree.leaf_position(tree.find("du")));
  ASSERT_EQ(path.size(), 3u);
  EXPECT_EQ(tree.node(path[1]).id, "d");
}

TEST(Tree, RejectsBadProbabilities) {
  EXPECT_THROW(ScenarioTree::build(1, {{"r", 0, "", 1.0}, {"a", 1, "r", 0.5}, {"b", 1, "r", 0.6}}),
               ModelError);
  EXPECT_THROW(ScenarioTree::build(1, {{"r", 0, "", 1.0}, {"a", 1, "r", 1.0}, {"b", 1, "r", 0.0}}),
               ModelError);
}

TEST(Tree, ErrorNamesNode) {
  try {
    ScenarioTree::build(1, {{"r", 0, "", 1.0}, {"a", 1, "zz", 1.0}});
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.node_id(), "a");
  }
}

TEST(Tree, RejectsDuplicateIdsAndTimeGaps) {
  EXPECT_THROW(ScenarioTree::build(1, {{"r", 0, "", 1.0}, {"r", 1, "r", 1.0}}), ModelError);
  EXPECT_THROW(ScenarioTree::build(2, {{"r", 0, "", 1.0}, {"a", 2, "r", 1.0}}), ModelError);
}

TEST(Wealth, TerminalWealthPaysSpreadBothWays) {
  auto tree = fixtures::one_period(0.5);
  auto bid = fixtures::process(tree, {{"r", 1.0}, {"u", 1.2}, {"d", 0.9}});
  auto ask = fixtures::process(tree, {{"r", 1.1}, {"u", 1.3}, {"d", 0.95}});
  Strategy s = Strategy::zero(tree);
  s.gamma[tree.find("r")] = 2.0;
  auto w = terminal_wealth(tree, {bid, ask}, s);
  // buy 2 at 1.1, sell 2 at the terminal bid
  EXPECT_NEAR(w.values[tree.leaf_position(tree.find("u"))], 1.0 - 2.2 + 2.4, 1e-15);
  EXPECT_NEAR(w.values[tree.leaf_position(tree.find("d"))], 1.0 - 2.2 + 1.8, 1e-15);
  s.gamma[tree.find("r")] = -1.0;
  w = terminal_wealth(tree, {bid, ask}, s);
  EXPECT_NEAR(w.values[tree.leaf_position(tree.find("u"))], 1.0 + 1.0 - 1.3, 1e-15);
}

TEST(Wealth, FrictionlessMatchesZeroSpread) {
  auto tree = fixtures::two_period(0.4);
  auto s = fixtures::process(
      tree, {{"r", 1.0}, {"u", 1.1}, {"d", 0.9}, {"uu", 1.3}, {"ud", 1.0}, {"du", 1.0}, {"dd", 0.7}});
  Strategy g = Strategy::zero(tree);
  g.gamma[tree.find("r")] = 0.5;
  g.gamma[tree.find("u")] = -0.25;
  g.gamma[tree.find("d")] = 1.5;
  auto a = terminal_wealth(tree, {s, s}, g);
  auto b = frictionless_wealth(tree, s, g);
  for (std::size_t l = 0; l < a.values.size(); ++l) EXPECT_NEAR(a.values[l], b.values[l], 1e-14);
}

TEST(Martingale, ConditionalExpectation) {
  auto tree = fixtures::two_period(0.5);
  auto s = fixtures::process(
      tree, {{"r", 1.0}, {"u", 1.1}, {"d", 0.9}, {"uu", 1.2}, {"ud", 1.0}, {"du", 1.0}, {"dd", 0.8}});
  auto check = is_martingale(tree, s, 1e-12);
  EXPECT_TRUE(check.is_martingale);
  auto e = conditional_expectation(tree, s, 2, 0);
  EXPECT_NEAR(e[tree.find("r")], 1.0, 1e-15);
  s[tree.find("uu")] = 1.3;
  check = is_martingale(tree, s, 1e-12);
  EXPECT_FALSE(check.is_martingale);
  EXPECT_EQ(tree.node(check.worst_node).id, "u");
}

TEST(Sequence, BanachLimitIsShiftInvariant) {
  AlmostConvergentSequence a({5.0, -3.0}, {-1.0, 2.0});
  EXPECT_DOUBLE_EQ(banach_limit(a), 0.5);
  EXPECT_DOUBLE_EQ(banach_limit(a.shifted()), 0.5);
  EXPECT_DOUBLE_EQ(banach_limit(AlmostConvergentSequence::constant(3.0)), 3.0);
  EXPECT_LT(uniform_cesaro_deviation(a, 4000, 50, 0.5), 1e-2);
}
