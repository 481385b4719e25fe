#pragma once

#include <limits>
#include <string>

#include "shadowprice/tree.hpp"

namespace shadowprice {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class UtilityKind { log, power, exponential, linear };

std::string to_string(UtilityKind kind);
/// Accepts "log", "power", "exp"/"exponential", "linear". Throws ModelError otherwise.
UtilityKind utility_kind_from_string(const std::string& name);

/// Concave nondecreasing scalar utility.
///   log:         ln y            (-inf for y <= 0)
///   power(p):    y^p / p         (-inf for y <= 0), p in (0, 1)
///   exponential: -exp(-a y) / a  a > 0, finite on R
///   linear:      y
class ScalarUtility {
 public:
  static ScalarUtility log() { return {UtilityKind::log, 0.0}; }
  static ScalarUtility power(double p);
  static ScalarUtility exponential(double a);
  static ScalarUtility linear() { return {UtilityKind::linear, 0.0}; }
  /// Validating factory used by the model loader.
  static ScalarUtility make(UtilityKind kind, double param);

  UtilityKind kind() const noexcept { return kind_; }
  double param() const noexcept { return param_; }

  /// True for kinds that are -inf on (-inf, 0].
  bool positive_domain() const noexcept {
    return kind_ == UtilityKind::log || kind_ == UtilityKind::power;
  }
  bool bounded_above() const noexcept { return kind_ == UtilityKind::exponential; }
  bool strictly_concave() const noexcept { return kind_ != UtilityKind::linear; }

  double value(double y) const;
  double derivative(double y) const;
  double second_derivative(double y) const;

  /// V(x) = inf_y (-U(y) + x y). Throws DomainError for x <= 0 with log/power.
  double conjugate(double x) const;
  double conjugate_derivative(double x) const;
  double conjugate_second_derivative(double x) const;

 private:
  ScalarUtility(UtilityKind kind, double param) : kind_(kind), param_(param) {}

  UtilityKind kind_;
  double param_;
};

/// Phi(X) = E U(X) + banach_weight * LIM(X - 1).
/// The Banach term acts on the gain X - 1 so that Phi(1) = U(1) for every weight.
struct UtilityFunctional {
  ScalarUtility scalar = ScalarUtility::log();
  double banach_weight = 0.0;
};

/// Extended-real value of Phi. Any leaf with U = -inf makes the result -inf.
/// Throws ConfigurationError when banach_weight > 0 and rv carries no tail.
double evaluate(const UtilityFunctional& phi, const RandomVariable& rv, const ScenarioTree& tree);

/// Free-function form of ScalarUtility::conjugate.
inline double conjugate(const ScalarUtility& u, double x) { return u.conjugate(x); }

}  // namespace shadowprice
