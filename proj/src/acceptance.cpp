#include "shadowprice/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "shadowprice/dual.hpp"
#include "shadowprice/examples.hpp"
#include "shadowprice/minimax.hpp"
#include "shadowprice/random_instances.hpp"
#include "shadowprice/relaxation.hpp"

namespace shadowprice {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

// Everything criteria 1-3 need from one random tree.
struct BatchEntry {
  PrimalProblem problem;
  PrimalSolution primal;
  DualSolution dual;
  ShadowPriceExtraction shadow;
  ShadowPriceCertificate cert;
};

struct Batch {
  std::vector<BatchEntry> entries;
  double solve_seconds = 0.0;  // primal + dual only
};

Batch build_batch(const AcceptanceOptions& o) {
  Batch b;
  std::mt19937_64 rng(o.seed);
  for (int i = 0; i < o.random_trees; ++i) {
    BatchEntry e{random_problem(rng), {}, {}, {}, {}};
    const auto t0 = Clock::now();
    e.primal = solve_primal(e.problem);
    e.dual = solve_dual(e.problem);
    b.solve_seconds += since(t0);
    if (e.dual.status == SolveStatus::optimal) {
      e.shadow = extract_shadow_price(e.problem.tree, e.problem.market, e.dual.z);
      e.cert = verify_shadow(e.problem, e.shadow.s_star);
    }
    b.entries.push_back(std::move(e));
  }
  return b;
}

CriterionResult strong_duality(const Batch& b, const AcceptanceOptions& o) {
  CriterionResult r{1, "strong duality on random trees", true, {}, {}, b.solve_seconds};
  double worst = 0.0;
  for (std::size_t i = 0; i < b.entries.size(); ++i) {
    const auto& e = b.entries[i];
    const double gap = std::abs(e.dual.value + e.primal.lambda);
    const bool ok = e.primal.status == SolveStatus::optimal && e.dual.status == SolveStatus::optimal &&
                    std::isfinite(gap) && gap <= 1e-6;
    if (std::isfinite(gap)) worst = std::max(worst, gap);
    if (!ok) {
      r.passed = false;
      r.failures.push_back("instance " + std::to_string(i) + ": |dual + lambda| = " + fmt(gap) +
                           " (primal " + to_string(e.primal.status) + ", dual " + to_string(e.dual.status) + ")");
    }
  }
  const bool fast = b.solve_seconds < o.time_limit;
  r.passed = r.passed && fast;
  r.detail = std::to_string(b.entries.size()) + " instances, max |dual + lambda| = " + fmt(worst) +
             " (tol 1e-6), solve time " + fmt(b.solve_seconds) + " s (limit " + fmt(o.time_limit) + " s)";
  return r;
}

CriterionResult shadow_property(const Batch& b) {
  const auto t0 = Clock::now();
  CriterionResult r{2, "dual-extracted shadow price", true, {}, {}, 0.0};
  double worst_gap = 0.0, worst_mart = 0.0;
  for (std::size_t i = 0; i < b.entries.size(); ++i) {
    const auto& e = b.entries[i];
    if (e.dual.status != SolveStatus::optimal) {
      r.passed = false;
      r.failures.push_back("instance " + std::to_string(i) + ": dual not solved");
      continue;
    }
    const auto& tree = e.problem.tree;
    const double gap = std::abs(e.cert.mu - e.cert.lambda);
    bool inside = true;
    AdaptedProcess z1s = AdaptedProcess::full(tree);
    for (NodeIndex n = 0; n < static_cast<NodeIndex>(tree.size()); ++n) {
      const double s = e.shadow.s_star[n];
      inside = inside && e.problem.market.bid[n] <= s && s <= e.problem.market.ask[n];
      z1s[n] = e.dual.z.z1[n] * s;
    }
    const auto mart = is_martingale(tree, z1s, 1e-9);
    if (std::isfinite(gap)) worst_gap = std::max(worst_gap, gap);
    worst_mart = std::max(worst_mart, mart.max_violation);
    if (!(gap <= 1e-6) || !inside || !mart.is_martingale) {
      r.passed = false;
      r.failures.push_back("instance " + std::to_string(i) + ": |mu - lambda| = " + fmt(gap) +
                           (inside ? "" : ", outside spread") + ", martingale violation " +
                           fmt(mart.max_violation));
    }
  }
  r.detail = "max |mu - lambda| = " + fmt(worst_gap) + " (tol 1e-6), max martingale violation of Z1 S* = " +
             fmt(worst_mart) + " (tol 1e-9), bid <= S* <= ask checked exactly";
  r.seconds = since(t0);
  return r;
}

CriterionResult slackness(const Batch& b) {
  const auto t0 = Clock::now();
  CriterionResult r{3, "complementary slackness at active nodes", true, {}, {}, 0.0};
  std::size_t active = 0, pass = 0;
  for (std::size_t i = 0; i < b.entries.size(); ++i) {
    const auto& e = b.entries[i];
    if (e.dual.status != SolveStatus::optimal) continue;
    for (const auto& s : e.cert.slackness) {
      if (s.side == "none") continue;
      ++active;
      if (s.ok) {
        ++pass;
        continue;
      }
      bool degenerate = false;
      for (NodeIndex d : e.shadow.degenerate_nodes) degenerate = degenerate || d == s.node;
      r.failures.push_back("instance " + std::to_string(i) + " node " + e.problem.tree.node(s.node).id + ": " +
                           s.side + " with dgamma " + fmt(s.increment) + ", S* off by " + fmt(s.deviation) +
                           (degenerate ? " (degenerate multiplier)" : ""));
    }
  }
  const double rate = active == 0 ? 1.0 : static_cast<double>(pass) / static_cast<double>(active);
  r.passed = rate >= 0.95;
  r.detail = std::to_string(pass) + "/" + std::to_string(active) + " active nodes pass (" + fmt(100.0 * rate) +
             "%, need 95%), tol 1e-5";
  r.seconds = since(t0);
  return r;
}

CriterionResult example4_arithmetic() {
  const auto t0 = Clock::now();
  CriterionResult r{4, "example 4 arithmetic", true, {}, {}, 0.0};
  ExampleDescriptor d;
  d.which = ExampleName::example4;
  d.N = 10;
  const auto inst = build_example(d);
  const auto& tree = inst.problem->tree;

  RandomVariable s1;
  for (NodeIndex leaf : tree.leaves()) s1.values.push_back(inst.problem->market.bid[leaf]);
  const auto cond = conditional_expectation(tree, s1, 0);
  double worst = 0.0;
  for (NodeIndex a : tree.layer(0)) worst = std::max(worst, std::abs(cond[a] - 2.0));
  if (worst > 1e-12) {
    r.passed = false;
    r.failures.push_back("E(S1|F0) deviates from 2 by " + fmt(worst));
  }

  const auto ds = example4_price_sequence().map([](double s) { return s - 2.0; });
  const double lim = banach_limit(ds);
  const double phi = evaluate(example4_functional(), example4_frictionless_wealth(inst, 1.0, 2.0), tree);
  if (lim != 0.5) {
    r.passed = false;
    r.failures.push_back("LIM(dS1) = " + fmt(lim));
  }
  if (std::abs(phi - 1.5) > 1e-12) {
    r.passed = false;
    r.failures.push_back("Phi(1 + dS1) = " + fmt(phi));
  }

  double worst_lambda = 0.0;
  for (int n : {1, 5, 10}) {
    d.N = n;
    const auto sol = solve_primal(*build_example(d).problem);
    const double dev = std::abs(sol.lambda - 1.0);
    worst_lambda = std::max(worst_lambda, std::isfinite(dev) ? dev : kInf);
    if (sol.status != SolveStatus::optimal || !(dev <= 1e-9)) {
      r.passed = false;
      r.failures.push_back("N = " + std::to_string(n) + ": lambda = " + fmt(sol.lambda));
    }
  }
  r.detail = "max |E(S1|D_n) - 2| = " + fmt(worst) + ", LIM(dS1) = " + fmt(lim) + ", Phi(1 + dS1) = " +
             fmt(phi) + ", max |lambda - 1| over N in {1, 5, 10} = " + fmt(worst_lambda);
  r.seconds = since(t0);
  return r;
}

// Bisection on the derivative of the per-atom term.
double atom_oracle(int n, int k) {
  const double p = std::ldexp(1.0, -n - k);
  auto d = [&](double g) { return -(1.0 - p) / (1.0 - g) + p * (1.0 + k) / (1.0 + (1.0 + k) * g); };
  double lo = -1.0 / (1.0 + k) + 1e-15, hi = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (d(mid) > 0.0 ? lo : hi) = mid;
  }
  const double g = 0.5 * (lo + hi);
  return (1.0 - p) * std::log(1.0 - g) + p * std::log(1.0 + (1.0 + k) * g);
}

CriterionResult example5_truncated() {
  const auto t0 = Clock::now();
  CriterionResult r{5, "example 5 truncated (n = 8, K = 6)", true, {}, {}, 0.0};
  ExampleDescriptor d;
  d.which = ExampleName::example5;
  d.n = 8;
  d.K = 6;
  const auto inst = build_example(d);
  double mass = 0.0, oracle = 0.0;
  for (int k = 0; k <= d.K; ++k) {
    const double pd = k == 0 ? 1.0 - std::ldexp(1.0, -d.n) : std::ldexp(1.0, -d.n - k);
    mass += pd;
    oracle += pd * atom_oracle(d.n, k);
  }
  oracle /= mass;
  const auto sol = solve_primal(*inst.problem);
  const double dev = std::abs(sol.lambda - oracle);
  if (!(dev <= 1e-8)) {
    r.passed = false;
    r.failures.push_back("lambda " + fmt(sol.lambda) + " vs oracle " + fmt(oracle));
  }
  const auto arb = detect_arbitrage(inst.problem->tree, *inst.candidate);
  const auto cert = verify_shadow(*inst.problem, *inst.candidate);
  if (!arb.arbitrage) {
    r.passed = false;
    r.failures.push_back("no arbitrage detected at the candidate");
  }
  if (cert.frictionless_status != SolveStatus::unbounded) {
    r.passed = false;
    r.failures.push_back("frictionless status " + to_string(cert.frictionless_status));
  }
  const double cdev = cert.constrained_mu ? std::abs(*cert.constrained_mu - oracle) : kInf;
  if (!(cdev <= 1e-8)) {
    r.passed = false;
    r.failures.push_back("constrained frictionless value off by " + fmt(cdev));
  }
  std::ostringstream os;
  os.precision(12);
  os << "lambda = " << sol.lambda << " vs oracle " << oracle << " (|diff| " << fmt(dev)
     << ", tol 1e-8); arbitrage " << (arb.arbitrage ? "detected" : "missed") << ", frictionless "
     << to_string(cert.frictionless_status) << ", |constrained mu - lambda| = " << fmt(cdev);
  r.detail = os.str();
  r.seconds = since(t0);
  return r;
}

CriterionResult example3_saddle(const AcceptanceOptions& o) {
  const auto t0 = Clock::now();
  CriterionResult r{6, "one-period saddle points", true, {}, {}, 0.0};
  std::mt19937_64 rng(o.seed + 6);
  double worst_violation = 0.0, worst_ratio = 0.0;
  for (int i = 0; i < o.one_period_models; ++i) {
    const auto m = random_one_period(rng);
    const auto sp = saddle_point_conditions(m);
    const auto [dlo, dhi] = frictional_domain(m);
    const double lo = std::max(sp.gamma0 - 1.0, dlo + 1e-9);
    const double hi = std::min(sp.gamma0 + 1.0, dhi - 1e-9);
    const auto rep = verify_saddle(m, sp.gamma0, sp.s1, SaddleGrid{lo, hi, 200, 200}, 1e-8);
    const auto grid = frictional_grid_lambda(m, lo, hi, 200);
    const double dev = std::abs(rep.value - grid.value);
    worst_violation = std::max({worst_violation, rep.left_violation, rep.right_violation});
    if (grid.tolerance > 0.0) worst_ratio = std::max(worst_ratio, dev / grid.tolerance);
    if (!rep.ok || !(dev <= 2.0 * grid.tolerance + 1e-14)) {
      r.passed = false;
      r.failures.push_back("model " + std::to_string(i) + " (" + to_string(sp.branch) + "): violations " +
                           fmt(rep.left_violation) + "/" + fmt(rep.right_violation) + ", |value - grid lambda| " +
                           fmt(dev) + " vs grid tol " + fmt(grid.tolerance));
    }
  }
  r.detail = std::to_string(o.one_period_models) + " models, 200x200 grid, max violation " + fmt(worst_violation) +
             " (tol 1e-8), max |value - grid lambda| / grid tol = " + fmt(worst_ratio) + " (limit 2)";
  r.seconds = since(t0);
  return r;
}

CriterionResult minimax(const AcceptanceOptions& o) {
  const auto t0 = Clock::now();
  CriterionResult r{7, "brute-force minimax", true, {}, {}, 0.0};
  std::mt19937_64 rng(o.seed + 7);
  double worst_identity = 0.0, worst_ratio = 0.0;
  int count = 0;
  auto one = [&](std::size_t leaves, int s_points) {
    const auto prob = random_one_step_problem(rng, leaves);
    const auto sol = solve_primal(prob);
    const double g = std::abs(sol.gamma_star.gamma[0]);
    GridSpec spec;
    spec.s_points = s_points;
    spec.gamma_hi = std::max(1.0, 2.0 * g);
    spec.gamma_lo = -spec.gamma_hi;
    spec.gamma_step = spec.gamma_hi / 200.0;
    const auto rep = brute_force_minimax(prob, spec);
    const double dev = std::max(std::abs(rep.supinf - rep.lambda), std::abs(rep.infsup - rep.lambda));
    worst_identity = std::max(worst_identity, rep.identity_error);
    if (rep.tolerance > 0.0) worst_ratio = std::max(worst_ratio, dev / rep.tolerance);
    const bool ok = rep.supinf <= rep.infsup && dev <= rep.tolerance + 1e-12 && rep.identity_error <= 1e-10;
    if (!ok) {
      r.passed = false;
      r.failures.push_back(std::to_string(leaves) + "-leaf instance " + std::to_string(count) + ": supinf " +
                           fmt(rep.supinf) + ", infsup " + fmt(rep.infsup) + ", lambda " + fmt(rep.lambda) +
                           ", tol " + fmt(rep.tolerance) + ", identity " + fmt(rep.identity_error));
    }
    ++count;
  };
  for (int i = 0; i < o.two_leaf; ++i) one(2, 9);
  for (int i = 0; i < o.four_leaf; ++i) one(4, 5);
  r.detail = std::to_string(o.two_leaf) + " two-leaf and " + std::to_string(o.four_leaf) +
             " four-leaf instances, max |value - lambda| / grid tol = " + fmt(worst_ratio) +
             ", max identity error " + fmt(worst_identity) + " (tol 1e-10)";
  r.seconds = since(t0);
  return r;
}

// Golden-section minimum of a unimodal function.
double golden_min(const std::function<double(double)>& f, double a, double b) {
  const double k = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - k * (b - a), d = a + k * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 300 && b - a > 1e-13; ++i) {
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

CriterionResult invariants(const AcceptanceOptions& o) {
  const auto t0 = Clock::now();
  CriterionResult r{8, "analytical invariants", true, {}, {}, 0.0};

  double conj_err = 0.0;
  for (const auto& u : {ScalarUtility::log(), ScalarUtility::power(0.3), ScalarUtility::power(0.5),
                        ScalarUtility::power(0.7)}) {
    for (int i = 0; i < 50; ++i) {
      const double x = 0.1 * std::pow(100.0, i / 49.0);
      // minimize over s = ln y so the search interval covers many magnitudes
      const double numeric = golden_min([&](double s) { return -u.value(std::exp(s)) + x * std::exp(s); }, -40.0, 40.0);
      conj_err = std::max(conj_err, std::abs(u.conjugate(x) - numeric));
    }
  }
  if (!(conj_err <= 1e-8)) {
    r.passed = false;
    r.failures.push_back("conjugate differs from numeric minimum by " + fmt(conj_err));
  }

  std::mt19937_64 rng(o.seed + 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_excess = -kInf;
  int samples = 0;
  while (samples < 10000) {
    const auto prob = random_problem(rng);
    const auto& tree = prob.tree;
    for (int k = 0; k < 250 && samples < 10000; ++k, ++samples) {
      AdaptedProcess s = AdaptedProcess::full(tree);
      for (NodeIndex n = 0; n < static_cast<NodeIndex>(tree.size()); ++n) {
        s[n] = prob.market.bid[n] + unit(rng) * prob.market.spread(n);
      }
      Strategy g = Strategy::zero(tree);
      for (NodeIndex n = 0; n < static_cast<NodeIndex>(tree.size()); ++n) {
        if (!tree.is_leaf(n)) g.gamma[n] = 6.0 * unit(rng) - 3.0;
      }
      const auto x = terminal_wealth(tree, prob.market, g);
      const auto f = frictionless_wealth(tree, s, g);
      for (std::size_t l = 0; l < x.values.size(); ++l) worst_excess = std::max(worst_excess, x.values[l] - f.values[l]);
    }
  }
  if (worst_excess > 1e-12) {
    r.passed = false;
    r.failures.push_back("terminal wealth exceeds frictionless wealth by " + fmt(worst_excess));
  }

  double tower = 0.0, proj = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto tree = random_tree(rng);
    RandomVariable xv;
    for (std::size_t l = 0; l < tree.leaf_count(); ++l) xv.values.push_back(4.0 * unit(rng) - 2.0);
    const int T = tree.horizon();
    for (int t = 0; t <= T; ++t) {
      const auto et = conditional_expectation(tree, xv, t);
      proj = std::max(proj, [&] {
        double m = 0.0;
        const auto again = conditional_expectation(tree, et, t, t);
        for (NodeIndex n : tree.layer(t)) m = std::max(m, std::abs(again[n] - et[n]));
        return m;
      }());
      for (int s = 0; s < t; ++s) {
        const auto nested = conditional_expectation(tree, et, t, s);
        const auto direct = conditional_expectation(tree, xv, s);
        for (NodeIndex n : tree.layer(s)) tower = std::max(tower, std::abs(nested[n] - direct[n]));
      }
    }
  }
  if (!(tower <= 1e-12) || !(proj <= 1e-12)) {
    r.passed = false;
    r.failures.push_back("tower error " + fmt(tower) + ", projection error " + fmt(proj));
  }
  r.detail = "conjugate error " + fmt(conj_err) + " (tol 1e-8, 4 utilities x 50 points); max X_T - X_T(S) = " +
             fmt(worst_excess) + " over 10000 samples; tower " + fmt(tower) + ", projection " + fmt(proj) +
             " (tol 1e-12)";
  r.seconds = since(t0);
  return r;
}

CriterionResult guarded(int id, const std::function<CriterionResult()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    CriterionResult r{id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what(), {}, 0.0};
    return r;
  }
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& o) {
  switch (id) {
    case 1: return guarded(1, [&] { return strong_duality(build_batch(o), o); });
    case 2: return guarded(2, [&] { return shadow_property(build_batch(o)); });
    case 3: return guarded(3, [&] { return slackness(build_batch(o)); });
    case 4: return guarded(4, [] { return example4_arithmetic(); });
    case 5: return guarded(5, [] { return example5_truncated(); });
    case 6: return guarded(6, [&] { return example3_saddle(o); });
    case 7: return guarded(7, [&] { return minimax(o); });
    case 8: return guarded(8, [&] { return invariants(o); });
    default: break;
  }
  return {id, "unknown criterion", false, {}, {}, 0.0};
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o) {
  std::vector<CriterionResult> out;
  Batch batch;
  std::string batch_error;
  try {
    batch = build_batch(o);
  } catch (const std::exception& e) {
    batch_error = e.what();
  }
  for (int id = 1; id <= 3; ++id) {
    if (!batch_error.empty()) {
      out.push_back({id, "criterion " + std::to_string(id), false, "exception: " + batch_error, {}, 0.0});
      continue;
    }
    out.push_back(guarded(id, [&] {
      if (id == 1) return strong_duality(batch, o);
      if (id == 2) return shadow_property(batch);
      return slackness(batch);
    }));
  }
  for (int id = 4; id <= 8; ++id) out.push_back(run_criterion(id, o));
  return out;
}

void print_results(std::ostream& os, const std::vector<CriterionResult>& results) {
  for (const auto& r : results) {
    os << (r.passed ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": " << r.detail << " ("
       << fmt(r.seconds) << " s)\n";
    for (const auto& f : r.failures) os << "        " << f << '\n';
  }
}

}  // namespace shadowprice
