#include "shadowprice/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "shadowprice/errors.hpp"

namespace shadowprice {

namespace {

constexpr double kEdge = 1e-12;

std::string scenario_name(std::size_t k) { return "scenario " + std::to_string(k); }

// Root of a strictly decreasing function on (lo, hi) with f(lo) > 0 > f(hi).
double bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void OnePeriodModel::validate() const {
  if (!(s0 > 0.0) || !std::isfinite(s0)) throw ModelError("s0 must be positive");
  if (scenarios.empty()) throw ModelError("model has no scenarios");
  if (u.kind() == UtilityKind::linear) {
    throw ModelError("one-period saddle analysis needs a strictly concave utility");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < scenarios.size(); ++k) {
    const auto& s = scenarios[k];
    if (!(s.p > 0.0)) throw ModelError("probability must be positive", scenario_name(k));
    if (!(s.bid1 > 0.0) || !std::isfinite(s.ask1)) throw ModelError("prices must be positive", scenario_name(k));
    if (!(s.ask1 > s.bid1)) throw ModelError("spread must be positive", scenario_name(k));
    total += s.p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ModelError("scenario probabilities do not sum to 1");
}

double relaxed_utility(const OnePeriodModel& model, double gamma0, const std::vector<double>& s1) {
  if (s1.size() != model.scenarios.size()) {
    throw StructuralError("one price per scenario expected");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < s1.size(); ++k) {
    const auto& sc = model.scenarios[k];
    if (!(s1[k] >= sc.bid1 && s1[k] <= sc.ask1)) {
      throw DomainError("price outside [bid1, ask1] in " + scenario_name(k));
    }
    const double w = (s1[k] - sc.bid1) / (sc.ask1 - sc.bid1);
    const double hi = model.u.value(1.0 + gamma0 * (sc.ask1 - model.s0));
    const double lo = model.u.value(1.0 + gamma0 * (sc.bid1 - model.s0));
    if (std::isinf(hi) || std::isinf(lo)) return -kInf;
    total += sc.p * (w * hi + (1.0 - w) * lo);
  }
  return total;
}

double frictionless_utility(const OnePeriodModel& model, double gamma0, const std::vector<double>& s1) {
  if (s1.size() != model.scenarios.size()) {
    throw StructuralError("one price per scenario expected");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < s1.size(); ++k) {
    const double v = model.u.value(1.0 + gamma0 * (s1[k] - model.s0));
    if (std::isinf(v)) return -kInf;
    total += model.scenarios[k].p * v;
  }
  return total;
}

double frictional_utility(const OnePeriodModel& model, double gamma0) {
  double total = 0.0;
  for (const auto& sc : model.scenarios) {
    const double exit = gamma0 > 0.0 ? sc.bid1 : sc.ask1;
    const double v = model.u.value(1.0 + gamma0 * (exit - model.s0));
    if (std::isinf(v)) return -kInf;
    total += sc.p * v;
  }
  return total;
}

std::pair<double, double> frictional_domain(const OnePeriodModel& model) {
  if (!model.u.positive_domain()) return {-kInf, kInf};
  double max_loss = 0.0;  // largest s0 - bid1
  double max_gain = 0.0;  // largest ask1 - s0
  for (const auto& sc : model.scenarios) {
    max_loss = std::max(max_loss, model.s0 - sc.bid1);
    max_gain = std::max(max_gain, sc.ask1 - model.s0);
  }
  return {max_gain > 0.0 ? -1.0 / max_gain : -kInf, max_loss > 0.0 ? 1.0 / max_loss : kInf};
}

std::string to_string(SaddleBranch b) {
  switch (b) {
    case SaddleBranch::positive: return "positive";
    case SaddleBranch::negative: return "negative";
    case SaddleBranch::zero: return "zero";
  }
  return "unknown";
}

SaddlePoint saddle_point_conditions(const OnePeriodModel& model) {
  model.validate();
  const auto& u = model.u;
  const double s0 = model.s0;
  auto foc = [&](double g, bool use_bid) {
    double acc = 0.0;
    for (const auto& sc : model.scenarios) {
      const double d = (use_bid ? sc.bid1 : sc.ask1) - s0;
      acc += sc.p * d * u.derivative(1.0 + g * d);
    }
    return acc;
  };
  const auto [dom_lo, dom_hi] = frictional_domain(model);
  SaddlePoint out;

  auto finish = [&](double g, bool use_bid, SaddleBranch branch) {
    out.gamma0 = g;
    out.branch = branch;
    out.s1.clear();
    for (const auto& sc : model.scenarios) out.s1.push_back(use_bid ? sc.bid1 : sc.ask1);
    out.foc_residual = std::abs(foc(g, use_bid));
    return out;
  };

  if (foc(0.0, true) > 0.0) {
    double hi = std::isfinite(dom_hi) ? dom_hi - kEdge : 1.0;
    if (!std::isfinite(dom_hi)) {
      while (foc(hi, true) > 0.0 && hi < 1e8) hi *= 2.0;
    }
    if (foc(hi, true) < 0.0) {
      return finish(bisect([&](double g) { return foc(g, true); }, 0.0, hi), true,
                    SaddleBranch::positive);
    }
  }
  if (foc(0.0, false) < 0.0) {
    double lo = std::isfinite(dom_lo) ? dom_lo + kEdge : -1.0;
    if (!std::isfinite(dom_lo)) {
      while (foc(lo, false) < 0.0 && lo > -1e8) lo *= 2.0;
    }
    if (foc(lo, false) > 0.0) {
      return finish(bisect([&](double g) { return foc(g, false); }, lo, 0.0), false,
                    SaddleBranch::negative);
    }
  }

  double e_bid = 0.0;
  double e_ask = 0.0;
  for (const auto& sc : model.scenarios) {
    e_bid += sc.p * sc.bid1;
    e_ask += sc.p * sc.ask1;
  }
  if (!(e_bid <= s0 && s0 <= e_ask)) {
    throw ModelError("no saddle point: neither first-order condition has a root and s0 lies outside [E bid1, E ask1]");
  }
  out.gamma0 = 0.0;
  out.branch = SaddleBranch::zero;
  out.theta = (s0 - e_bid) / (e_ask - e_bid);
  out.s1.clear();
  double drift = 0.0;
  for (const auto& sc : model.scenarios) {
    const double s = std::clamp(out.theta * sc.ask1 + (1.0 - out.theta) * sc.bid1, sc.bid1, sc.ask1);
    out.s1.push_back(s);
    drift += sc.p * (s - s0);
  }
  out.foc_residual = std::abs(u.derivative(1.0) * drift);
  return out;
}

SaddleReport verify_saddle(const OnePeriodModel& model, double gamma0_star,
                           const std::vector<double>& s1_star, const SaddleGrid& grid, double tol) {
  if (grid.gamma_points < 2 || grid.s_points < 2) throw ConfigurationError("grids need at least 2 points");
  SaddleReport rep;
  rep.tol = tol;
  rep.value = relaxed_utility(model, gamma0_star, s1_star);
  rep.worst_gamma = gamma0_star;

  const double step = (grid.gamma_hi - grid.gamma_lo) / (grid.gamma_points - 1);
  for (int i = 0; i < grid.gamma_points; ++i) {
    const double g = grid.gamma_lo + step * i;
    const double v = relaxed_utility(model, g, s1_star);
    if (v - rep.value > rep.left_violation) {
      rep.left_violation = v - rep.value;
      rep.worst_gamma = g;
    }
  }

  // the relaxed utility is a sum over scenarios, so each coordinate is minimized alone
  std::vector<double> s = s1_star;
  double decrease = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto& sc = model.scenarios[k];
    double best = 0.0;
    for (int j = 0; j < grid.s_points; ++j) {
      s[k] = j + 1 == grid.s_points ? sc.ask1 : sc.bid1 + (sc.ask1 - sc.bid1) * j / (grid.s_points - 1);
      best = std::max(best, rep.value - relaxed_utility(model, gamma0_star, s));
    }
    s[k] = s1_star[k];
    decrease += best;
  }
  rep.right_violation = decrease;
  rep.ok = rep.left_violation <= tol && rep.right_violation <= tol && std::isfinite(rep.value);
  return rep;
}

GridMaximum frictional_grid_lambda(const OnePeriodModel& model, double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw ConfigurationError("gamma grid needs 2 points on a nonempty interval");
  const double step = (hi - lo) / (points - 1);
  std::vector<double> v(static_cast<std::size_t>(points));
  std::size_t best = 0;
  for (int i = 0; i < points; ++i) {
    v[static_cast<std::size_t>(i)] = frictional_utility(model, lo + step * i);
    if (v[static_cast<std::size_t>(i)] > v[best]) best = static_cast<std::size_t>(i);
  }
  GridMaximum out;
  out.value = v[best];
  out.argmax = lo + step * static_cast<double>(best);
  // concave: the continuous maximizer sits within one step, and the slope there
  // is bounded by the neighbouring secants
  double slope = 0.0;
  if (best > 0 && std::isfinite(v[best - 1])) slope = std::max(slope, v[best] - v[best - 1]);
  if (best + 1 < v.size() && std::isfinite(v[best + 1])) slope = std::max(slope, v[best] - v[best + 1]);
  out.tolerance = slope;
  return out;
}

}  // namespace shadowprice
