#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace shadowprice {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  std::vector<std::string> failures;  // listed individually where the criterion tolerates some
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240611;
  int random_trees = 200;
  int one_period_models = 20;
  int two_leaf = 10;
  int four_leaf = 5;
  double time_limit = 60.0;  // seconds, for the strong-duality batch
};

/// Runs the eight acceptance criteria in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// Individual criteria, 1-based ids as in run_acceptance. Criteria 1-3 share
/// one batch of random trees; calling them separately rebuilds it.
CriterionResult run_criterion(int id, const AcceptanceOptions& options = {});

/// One "PASS"/"FAIL" line per criterion, plus indented failure lines.
void print_results(std::ostream& os, const std::vector<CriterionResult>& results);

}  // namespace shadowprice
