#pragma once

#include <string>
#include <vector>

#include "shadowprice/utility.hpp"

namespace shadowprice {

struct Scenario {
  double p = 0.0;
  double bid1 = 0.0;
  double ask1 = 0.0;
};

/// One-period market: the stock trades at s0 at time 0 (no spread) and within
/// [bid1, ask1] at time 1, scenario by scenario.
struct OnePeriodModel {
  double s0 = 1.0;
  std::vector<Scenario> scenarios;
  ScalarUtility u = ScalarUtility::log();

  /// Throws ModelError (naming "scenario k") on invalid input.
  void validate() const;
};

/// Piecewise-linear envelope in S1 of the endpoint utilities:
///   E[ U(1 + g (ask1 - s0)) w + U(1 + g (bid1 - s0)) (1 - w) ],  w = (S1 - bid1) / (ask1 - bid1).
/// -inf if an endpoint utility is -inf on a scenario. Throws DomainError if s1 leaves [bid1, ask1].
double relaxed_utility(const OnePeriodModel& model, double gamma0, const std::vector<double>& s1);

/// E U(1 + g (S1 - s0)) for a frictionless time-1 price S1.
double frictionless_utility(const OnePeriodModel& model, double gamma0, const std::vector<double>& s1);

/// E U(X_1(g)): buy at s0, sell at bid1 when g > 0; sell at s0, buy back at ask1 when g < 0.
double frictional_utility(const OnePeriodModel& model, double gamma0);

enum class SaddleBranch { positive, negative, zero };
std::string to_string(SaddleBranch b);

struct SaddlePoint {
  double gamma0 = 0.0;
  std::vector<double> s1;
  SaddleBranch branch = SaddleBranch::zero;
  double foc_residual = 0.0;  // |E[(S1* - s0) U'(1 + g* (S1* - s0))]|
  double theta = 0.0;         // mixing weight on ask1 for the zero branch
};

/// Solves the saddle conditions: S1* = bid1 if g* > 0, ask1 if g* < 0, plus the
/// first-order condition, by bisection. Throws ModelError when no branch applies.
SaddlePoint saddle_point_conditions(const OnePeriodModel& model);

struct SaddleGrid {
  double gamma_lo = -1.0;
  double gamma_hi = 1.0;
  int gamma_points = 200;
  int s_points = 200;  // per scenario, across [bid1, ask1]
};

struct SaddleReport {
  double value = 0.0;            // relaxed utility at (S*, g*)
  double left_violation = 0.0;   // max_g  value(S*, g) - value(S*, g*)
  double right_violation = 0.0;  // max_S  value(S*, g*) - value(S, g*)
  double worst_gamma = 0.0;
  double tol = 0.0;
  bool ok = true;
};

/// Grid check of both saddle inequalities. The S side uses that the relaxed
/// utility is a sum of per-scenario terms, so the minimum over the product grid
/// is attained coordinate-wise.
SaddleReport verify_saddle(const OnePeriodModel& model, double gamma0_star,
                           const std::vector<double>& s1_star, const SaddleGrid& grid, double tol);

struct GridMaximum {
  double value = 0.0;
  double argmax = 0.0;
  double tolerance = 0.0;  // local slope bound times step
};

/// max over a uniform gamma grid of the frictional utility with an error bar.
GridMaximum frictional_grid_lambda(const OnePeriodModel& model, double lo, double hi, int points);

/// Interval of g where the frictional utility is finite (whole line for exp).
std::pair<double, double> frictional_domain(const OnePeriodModel& model);

}  // namespace shadowprice
