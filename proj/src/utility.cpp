#include "shadowprice/utility.hpp"

#include <cmath>

#include "shadowprice/errors.hpp"

namespace shadowprice {

std::string to_string(UtilityKind kind) {
  switch (kind) {
    case UtilityKind::log: return "log";
    case UtilityKind::power: return "power";
    case UtilityKind::exponential: return "exp";
    case UtilityKind::linear: return "linear";
  }
  return "unknown";
}

UtilityKind utility_kind_from_string(const std::string& name) {
  if (name == "log") return UtilityKind::log;
  if (name == "power") return UtilityKind::power;
  if (name == "exp" || name == "exponential") return UtilityKind::exponential;
  if (name == "linear") return UtilityKind::linear;
  throw ModelError("unknown utility kind '" + name + "'");
}

ScalarUtility ScalarUtility::power(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ModelError("power utility needs p in (0, 1)");
  return {UtilityKind::power, p};
}

ScalarUtility ScalarUtility::exponential(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ModelError("exponential utility needs a > 0");
  return {UtilityKind::exponential, a};
}

ScalarUtility ScalarUtility::make(UtilityKind kind, double param) {
  switch (kind) {
    case UtilityKind::log: return log();
    case UtilityKind::power: return power(param);
    case UtilityKind::exponential: return exponential(param);
    case UtilityKind::linear: return linear();
  }
  throw ModelError("unknown utility kind");
}

double ScalarUtility::value(double y) const {
  switch (kind_) {
    case UtilityKind::log: return y > 0.0 ? std::log(y) : -kInf;
    case UtilityKind::power: return y > 0.0 ? std::pow(y, param_) / param_ : -kInf;
    case UtilityKind::exponential: return -std::exp(-param_ * y) / param_;
    case UtilityKind::linear: return y;
  }
  return -kInf;
}

double ScalarUtility::derivative(double y) const {
  switch (kind_) {
    case UtilityKind::log: return y > 0.0 ? 1.0 / y : kInf;
    case UtilityKind::power: return y > 0.0 ? std::pow(y, param_ - 1.0) : kInf;
    case UtilityKind::exponential: return std::exp(-param_ * y);
    case UtilityKind::linear: return 1.0;
  }
  return kInf;
}

double ScalarUtility::second_derivative(double y) const {
  switch (kind_) {
    case UtilityKind::log: return y > 0.0 ? -1.0 / (y * y) : -kInf;
    case UtilityKind::power: return y > 0.0 ? (param_ - 1.0) * std::pow(y, param_ - 2.0) : -kInf;
    case UtilityKind::exponential: return -param_ * std::exp(-param_ * y);
    case UtilityKind::linear: return 0.0;
  }
  return -kInf;
}

double ScalarUtility::conjugate(double x) const {
  switch (kind_) {
    case UtilityKind::log:
      if (!(x > 0.0)) throw DomainError("log conjugate needs x > 0");
      return 1.0 + std::log(x);
    case UtilityKind::power: {
      if (!(x > 0.0)) throw DomainError("power conjugate needs x > 0");
      const double p = param_;
      return -((1.0 - p) / p) * std::pow(x, p / (p - 1.0));
    }
    case UtilityKind::exponential:
      if (x < 0.0) return -kInf;
      if (x == 0.0) return 0.0;
      return (x - x * std::log(x)) / param_;
    case UtilityKind::linear:
      return x == 1.0 ? 0.0 : -kInf;
  }
  return -kInf;
}

double ScalarUtility::conjugate_derivative(double x) const {
  switch (kind_) {
    case UtilityKind::log: return 1.0 / x;
    case UtilityKind::power: {
      const double p = param_;
      const double r = p / (p - 1.0);
      return -((1.0 - p) / p) * r * std::pow(x, r - 1.0);
    }
    case UtilityKind::exponential: return -std::log(x) / param_;
    case UtilityKind::linear: return 0.0;
  }
  return 0.0;
}

double ScalarUtility::conjugate_second_derivative(double x) const {
  switch (kind_) {
    case UtilityKind::log: return -1.0 / (x * x);
    case UtilityKind::power: {
      const double p = param_;
      const double r = p / (p - 1.0);
      return -((1.0 - p) / p) * r * (r - 1.0) * std::pow(x, r - 2.0);
    }
    case UtilityKind::exponential: return -1.0 / (param_ * x);
    case UtilityKind::linear: return 0.0;
  }
  return 0.0;
}

double evaluate(const UtilityFunctional& phi, const RandomVariable& rv, const ScenarioTree& tree) {
  if (rv.values.size() != tree.leaf_count()) {
    throw StructuralError("random variable does not match the tree's leaves");
  }
  double total = 0.0;
  const auto leaves = tree.leaves();
  for (std::size_t pos = 0; pos < rv.values.size(); ++pos) {
    const double u = phi.scalar.value(rv.values[pos]);
    if (u == -kInf) return -kInf;
    total += tree.node(leaves[pos]).p * u;
  }
  if (phi.banach_weight > 0.0) {
    if (!rv.tail) throw ConfigurationError("Banach-limit term needs a tail descriptor on the random variable");
    total += phi.banach_weight * (banach_limit(*rv.tail) - 1.0);
  } else if (phi.banach_weight < 0.0) {
    throw ConfigurationError("banach_weight must be >= 0");
  }
  return total;
}

}  // namespace shadowprice
