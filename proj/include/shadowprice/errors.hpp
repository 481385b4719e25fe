#pragma once

#include <stdexcept>
#include <string>

namespace shadowprice {

/// Invalid model input (probabilities, prices, ids). Carries the offending node id when known.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what, std::string node_id = {})
      : std::runtime_error(node_id.empty() ? what : "node '" + node_id + "': " + what),
        node_id_(std::move(node_id)) {}

  const std::string& node_id() const noexcept { return node_id_; }

 private:
  std::string node_id_;
};

/// Shapes of trees, processes and strategies do not line up.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Operation requested in a configuration it does not support.
class ConfigurationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid verification would exceed the evaluation budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(double required, double budget)
      : std::runtime_error("grid requires " + std::to_string(required) +
                           " evaluations, budget is " + std::to_string(budget)),
        required_(required) {}

  double required() const noexcept { return required_; }

 private:
  double required_;
};

}  // namespace shadowprice
