#pragma once

#include <cstddef>
#include <vector>

#include "shadowprice/primal.hpp"

namespace shadowprice {

/// Uniform grids: s_points values across [bid, ask] at every node with a
/// positive spread (one value where the spread is zero), and the same gamma
/// interval and step for every holding variable.
struct GridSpec {
  int s_points = 5;
  double gamma_lo = -2.0;
  double gamma_hi = 2.0;
  double gamma_step = 0.02;
  double budget = 1e7;  // total evaluations allowed
  unsigned threads = 0; // 0: SHADOWPRICE_THREADS or hardware concurrency

  int gamma_points() const;
};

struct MinimaxReport {
  double supinf = 0.0;  // max over gamma grid of min over S grid of Psi(S, gamma)
  double infsup = 0.0;  // min over S grid of the frictionless optimum mu_S
  double lambda = 0.0;
  double tolerance = 0.0;       // max of the two sides below
  double tol_supinf = 0.0;      // sum over holdings of local slope * gamma step
  double tol_infsup = 0.0;      // sum over nodes of local slope * S step
  /// max over the gamma grid of |min_S Psi(S, gamma) - Phi(X_T(gamma))|
  double identity_error = 0.0;
  AdaptedProcess argmin_s;
  Strategy argmax_gamma;
  double evaluations = 0.0;
};

/// Grid evaluation of sup-inf and inf-sup of Psi(S, gamma) = Phi(1 + (gamma . S)_T)
/// over S in [bid, ask]. On a finite tree Psi needs no relaxation. The inner sup in
/// inf-sup uses the frictionless solver. Throws BudgetExceeded before any work if
/// the grids are too large.
MinimaxReport brute_force_minimax(const PrimalProblem& problem, const GridSpec& grids);

/// Evaluations brute_force_minimax would need.
double minimax_cost(const PrimalProblem& problem, const GridSpec& grids);

struct SaddleEquivalenceReport {
  double lambda = 0.0;
  double mu = 0.0;          // frictionless value at S*
  double phi_gamma = 0.0;   // Phi(X_T(gamma*))
  double value = 0.0;       // Psi(S*, gamma*)
  double left_violation = 0.0;   // max_gamma Psi(S*, gamma) - Psi(S*, gamma*)
  double right_violation = 0.0;  // max_S Psi(S*, gamma*) - Psi(S, gamma*)
  bool saddle_holds = false;
  bool gamma_optimal = false;
  bool shadow = false;
  bool forward_ok = false;   // optimal and shadow => saddle
  bool backward_ok = false;  // saddle => optimal and shadow
  double tol = 0.0;
};

SaddleEquivalenceReport check_saddle_equivalence(const PrimalProblem& problem,
                                                 const AdaptedProcess& s_star,
                                                 const Strategy& gamma_star, const GridSpec& grids,
                                                 double tol);

}  // namespace shadowprice
