#pragma once

#include <map>
#include <optional>
#include <string>

#include "shadowprice/primal.hpp"
#include "shadowprice/relaxation.hpp"

namespace shadowprice {

enum class ExampleName { example3, example4, example5 };
std::string to_string(ExampleName e);
/// Throws ConfigurationError for unknown names.
ExampleName example_from_string(const std::string& name);

struct ExampleDescriptor {
  ExampleName which = ExampleName::example5;
  int n = 8;      // example5: probability scale 2^-n
  int K = 6;      // example5: atoms D_0..D_K are kept
  int N = 10;     // example4: atoms D_1..D_N are kept
  int quad = 16;  // example3: number of equally likely scenarios
};

struct ExpectedDiagnostics {
  std::map<std::string, double> values;
  std::map<std::string, std::string> notes;
};

struct ExampleInstance {
  ExampleDescriptor descriptor;
  std::optional<PrimalProblem> problem;        // example4, example5
  std::optional<OnePeriodModel> one_period;    // example3
  std::optional<AdaptedProcess> candidate;     // candidate shadow price, when the example names one
  ExpectedDiagnostics expected;
};

/// Builds a ready-to-solve instance. Throws ModelError naming the atom when the
/// example5 drift condition fails for the chosen n.
ExampleInstance build_example(const ExampleDescriptor& desc);

// --- example4 (countable space, linear utility plus a Banach-limit term) ---

/// Time-1 price as a sequence over outcomes 1, 2, 3, ...: 1 on odd, 4 on even.
AlmostConvergentSequence example4_price_sequence();

/// Terminal wealth 1 + g (S_1 - s0) on the truncated leaves, with the full
/// outcome sequence attached as tail.
RandomVariable example4_frictionless_wealth(const ExampleInstance& inst, double gamma0, double s0);

/// Phi with linear utility and Banach weight 1, as in the example.
UtilityFunctional example4_functional();

// --- example5 (falling bid, log utility) ---

/// Per-atom optimal short position p - (1 - p) / (1 + k), p = 2^(-n-k).
double example5_gamma(int n, int k);

/// Value of (1 - p) ln(1 - g) + p ln(1 + (1 + k) g).
double example5_atom_value(int n, int k, double g);

}  // namespace shadowprice
