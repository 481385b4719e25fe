#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "shadowprice/errors.hpp"
#include "shadowprice/utility.hpp"

using namespace shadowprice;

namespace {

// inf over y of -U(y) + x y by golden section in s = ln y (or y itself for exp)
double numeric_conjugate(const ScalarUtility& u, double x, bool log_scale) {
  auto f = [&](double s) {
    const double y = log_scale ? std::exp(s) : s;
    return -u.value(y) + x * y;
  };
  double a = log_scale ? -40.0 : -50.0, b = log_scale ? 40.0 : 50.0;
  const double k = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - k * (b - a), d = a + k * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 300; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - k * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + k * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

}  // namespace

TEST(Utility, ConjugateMatchesNumericMinimum) {
  for (const auto& u : {ScalarUtility::log(), ScalarUtility::power(0.3), ScalarUtility::power(0.7)}) {
    for (int i = 0; i < 50; ++i) {
      const double x = 0.1 * std::pow(100.0, i / 49.0);
      EXPECT_NEAR(u.conjugate(x), numeric_conjugate(u, x, true), 1e-8) << to_string(u.kind()) << " x=" << x;
    }
  }
  const auto e = ScalarUtility::exponential(1.5);
  for (double x : {0.05, 0.5, 1.0, 3.0}) EXPECT_NEAR(e.conjugate(x), numeric_conjugate(e, x, false), 1e-8);
}

TEST(Utility, FenchelInequalityProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pos(0.01, 20.0);
  for (const auto& u : {ScalarUtility::log(), ScalarUtility::power(0.5), ScalarUtility::exponential(2.0)}) {
    for (int i = 0; i < 2000; ++i) {
      const double x = pos(rng), y = pos(rng);
      EXPECT_LE(u.conjugate(x), -u.value(y) + x * y + 1e-12);
    }
  }
}

TEST(Utility, ConjugateDerivativesMatchDifferences) {
  for (const auto& u : {ScalarUtility::log(), ScalarUtility::power(0.4), ScalarUtility::exponential(0.7)}) {
    for (double x : {0.3, 1.0, 2.5}) {
      const double h = 1e-5;
      const double d1 = (u.conjugate(x + h) - u.conjugate(x - h)) / (2 * h);
      const double d2 = (u.conjugate_derivative(x + h) - u.conjugate_derivative(x - h)) / (2 * h);
      EXPECT_NEAR(u.conjugate_derivative(x), d1, 1e-6);
      EXPECT_NEAR(u.conjugate_second_derivative(x), d2, 1e-5);
    }
  }
}

TEST(Utility, DomainsAndParameters) {
  EXPECT_EQ(ScalarUtility::log().value(0.0), -kInf);
  EXPECT_EQ(ScalarUtility::power(0.5).value(-1.0), -kInf);
  EXPECT_TRUE(std::isfinite(ScalarUtility::exponential(1.0).value(-5.0)));
  EXPECT_THROW(ScalarUtility::power(1.0), ModelError);
  EXPECT_THROW(ScalarUtility::exponential(0.0), ModelError);
  EXPECT_THROW(ScalarUtility::log().conjugate(0.0), DomainError);
  EXPECT_EQ(ScalarUtility::linear().conjugate(1.0), 0.0);
  EXPECT_EQ(ScalarUtility::linear().conjugate(1.5), -kInf);
  EXPECT_EQ(utility_kind_from_string("exponential"), UtilityKind::exponential);
  EXPECT_THROW(utility_kind_from_string("quadratic"), ModelError);
}
