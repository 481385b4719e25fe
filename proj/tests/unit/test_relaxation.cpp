#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shadowprice/errors.hpp"
#include "shadowprice/random_instances.hpp"
#include "shadowprice/relaxation.hpp"

using namespace shadowprice;

namespace {

OnePeriodModel two_scenarios(double s0, double b1, double b2, double spread,
                             ScalarUtility u = ScalarUtility::log()) {
  OnePeriodModel m;
  m.s0 = s0;
  m.u = u;
  m.scenarios = {{0.5, b1, b1 + spread}, {0.5, b2, b2 + spread}};
  return m;
}

// Golden-section maximization of a concave function on [lo, hi].
template <class F>
double golden_max(F f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 200; ++i) {
    if (fc < fd) {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    } else {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST(Relaxation, EndpointsAndMidpointInterpolate) {
  auto m = two_scenarios(1.0, 0.8, 1.1, 0.2);
  const double g = 0.7;
  EXPECT_DOUBLE_EQ(relaxed_utility(m, 0.0, {0.9, 1.2}), 0.0);
  EXPECT_NEAR(relaxed_utility(m, g, {1.0, 1.3}), frictionless_utility(m, g, {1.0, 1.3}), 1e-15);
  EXPECT_NEAR(relaxed_utility(m, g, {0.8, 1.1}), frictionless_utility(m, g, {0.8, 1.1}), 1e-15);
  const double mid = relaxed_utility(m, g, {0.9, 1.2});
  const double avg = 0.5 * (relaxed_utility(m, g, {0.8, 1.1}) + relaxed_utility(m, g, {1.0, 1.3}));
  EXPECT_NEAR(mid, avg, 1e-15);
}

TEST(Relaxation, OutOfBoundsPriceThrows) {
  auto m = two_scenarios(1.0, 0.8, 1.1, 0.2);
  EXPECT_THROW(relaxed_utility(m, 0.1, {0.7, 1.2}), DomainError);
}

TEST(Relaxation, ValidateNamesScenario) {
  auto m = two_scenarios(1.0, 0.8, 1.1, 0.2);
  m.scenarios[1].ask1 = m.scenarios[1].bid1;
  try {
    m.validate();
    FAIL();
  } catch (const ModelError& e) {
    EXPECT_EQ(e.node_id(), "scenario 1");
  }
}

TEST(Relaxation, ZeroBranchUsesCommonMixingWeight) {
  auto m = two_scenarios(2.0, 1.0, 2.0, 1.0);
  auto sp = saddle_point_conditions(m);
  EXPECT_EQ(sp.branch, SaddleBranch::zero);
  EXPECT_DOUBLE_EQ(sp.gamma0, 0.0);
  EXPECT_DOUBLE_EQ(sp.theta, 0.5);
  EXPECT_NEAR(0.5 * sp.s1[0] + 0.5 * sp.s1[1], 2.0, 1e-15);
  // independent check: the frictional utility on a grid peaks at 0
  double best = -kInf, arg = 1.0;
  for (int i = -100; i <= 100; ++i) {
    const double g = i * 0.009;
    const double v = frictional_utility(m, g);
    if (v > best) {
      best = v;
      arg = g;
    }
  }
  EXPECT_DOUBLE_EQ(arg, 0.0);
}

TEST(Relaxation, ShiftedModelGoesLong) {
  auto m = two_scenarios(1.0, 0.9, 1.3, 0.1);
  auto sp = saddle_point_conditions(m);
  EXPECT_EQ(sp.branch, SaddleBranch::positive);
  EXPECT_GT(sp.gamma0, 0.0);
  EXPECT_LE(sp.foc_residual, 1e-10);
  const double oracle = golden_max([&](double g) { return frictional_utility(m, g); }, 0.0, 10.0 - 1e-9);
  EXPECT_NEAR(sp.gamma0, oracle, 1e-6);
  EXPECT_EQ(sp.s1[0], 0.9);
  EXPECT_EQ(sp.s1[1], 1.3);
}

TEST(Relaxation, ShortBranchBuysBackAtAsk) {
  auto m = two_scenarios(1.0, 0.6, 1.0, 0.1);
  auto sp = saddle_point_conditions(m);
  EXPECT_EQ(sp.branch, SaddleBranch::negative);
  EXPECT_LT(sp.gamma0, 0.0);
  EXPECT_EQ(sp.s1[0], 0.7);
  EXPECT_EQ(sp.s1[1], 1.1);
  const double oracle = golden_max([&](double g) { return frictional_utility(m, g); }, -10.0 + 1e-9, 0.0);
  EXPECT_NEAR(sp.gamma0, oracle, 1e-6);
}

TEST(Relaxation, InconsistentModelRejected) {
  auto m = two_scenarios(1.0, 1.1, 1.2, 0.1);
  EXPECT_THROW(saddle_point_conditions(m), ModelError);
}

TEST(Relaxation, SaddleVerifiesAndWrongCandidateFails) {
  auto m = two_scenarios(1.0, 0.9, 1.3, 0.1);
  auto sp = saddle_point_conditions(m);
  SaddleGrid grid{sp.gamma0 - 1.0, sp.gamma0 + 1.0, 200, 200};
  auto rep = verify_saddle(m, sp.gamma0, sp.s1, grid, 1e-8);
  EXPECT_TRUE(rep.ok) << rep.left_violation << " " << rep.right_violation;
  EXPECT_EQ(rep.right_violation, 0.0);

  auto wrong = sp.s1;
  for (std::size_t k = 0; k < wrong.size(); ++k) wrong[k] = m.scenarios[k].ask1;
  auto bad = verify_saddle(m, sp.gamma0, wrong, grid, 1e-8);
  EXPECT_GT(bad.right_violation, 1e-6);
  EXPECT_FALSE(bad.ok);

  // moving S toward the ask raises the relaxed utility when gamma* > 0
  auto up = sp.s1;
  up[0] += 0.05;
  EXPECT_GT(relaxed_utility(m, sp.gamma0, up), rep.value);
  EXPECT_GT(rep.value, relaxed_utility(m, sp.gamma0 + 0.1, sp.s1));
}

TEST(Relaxation, EnvelopeIsSqueezedProperty) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    auto m = random_one_period(rng);
    const auto [lo, hi] = frictional_domain(m);
    const double glo = std::isfinite(lo) ? lo : -3.0;
    const double ghi = std::isfinite(hi) ? hi : 3.0;
    std::uniform_real_distribution<double> ug(glo, ghi), uw(0.0, 1.0);
    for (int s = 0; s < 50; ++s) {
      const double g = ug(rng);
      std::vector<double> s1;
      for (const auto& sc : m.scenarios) s1.push_back(sc.bid1 + uw(rng) * (sc.ask1 - sc.bid1));
      const double relaxed = relaxed_utility(m, g, s1);
      if (!std::isfinite(relaxed)) continue;
      EXPECT_LE(relaxed, frictionless_utility(m, g, s1) + 1e-12);
      EXPECT_GE(relaxed, frictional_utility(m, g) - 1e-12);
    }
  }
}

TEST(Relaxation, SaddleValueMatchesGridLambda) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto m = random_one_period(rng);
    auto sp = saddle_point_conditions(m);
    const auto [dlo, dhi] = frictional_domain(m);
    const double lo = std::max(sp.gamma0 - 1.0, dlo + 1e-9);
    const double hi = std::min(sp.gamma0 + 1.0, dhi - 1e-9);
    auto grid = frictional_grid_lambda(m, lo, hi, 2001);
    const double value = relaxed_utility(m, sp.gamma0, sp.s1);
    EXPECT_NEAR(value, frictional_utility(m, sp.gamma0), 1e-12);
    EXPECT_GE(value, grid.value - 1e-12);
    EXPECT_LE(value - grid.value, 2.0 * grid.tolerance + 1e-12);
  }
}
