#include <cstdlib>
#include <iostream>
#include <string>

#include "shadowprice/acceptance.hpp"

int main(int argc, char** argv) {
  shadowprice::AcceptanceOptions opts;
  if (argc > 1) opts.seed = std::stoull(argv[1]);
  const auto results = shadowprice::run_acceptance(opts);
  shadowprice::print_results(std::cout, results);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
