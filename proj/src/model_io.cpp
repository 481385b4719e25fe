#include "shadowprice/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "shadowprice/errors.hpp"

namespace shadowprice {

namespace {

double read_number(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
  }
  if (j.is_null()) return kInf;  // callers decide the sign for bounds
  throw ModelError(what + " must be a number");
}

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ModelError(std::string("missing field '") + key + "'");
  return j.at(key);
}

ScalarUtility read_utility(const Json& j, double* banach_weight) {
  if (j.is_string()) return ScalarUtility::make(utility_kind_from_string(j.get<std::string>()), 0.0);
  const auto kind = utility_kind_from_string(need(j, "kind").get<std::string>());
  const double param = j.contains("param") ? j.at("param").get<double>() : 0.0;
  if (banach_weight) *banach_weight = j.contains("banach_weight") ? j.at("banach_weight").get<double>() : 0.0;
  return ScalarUtility::make(kind, param);
}

Json utility_json(const ScalarUtility& u, double banach_weight) {
  Json j{{"kind", to_string(u.kind())}};
  if (u.kind() == UtilityKind::power || u.kind() == UtilityKind::exponential) j["param"] = u.param();
  if (banach_weight != 0.0) j["banach_weight"] = banach_weight;
  return j;
}

AdaptedProcess read_process(const ScenarioTree& tree, const Json& j, const char* what) {
  if (!j.is_object()) throw ModelError(std::string(what) + " must map node ids to values");
  AdaptedProcess x = AdaptedProcess::full(tree, std::nan(""));
  for (const auto& [id, v] : j.items()) {
    const auto i = tree.lookup(id);
    if (!i) throw ModelError(std::string(what) + " refers to an unknown node", id);
    x[*i] = read_number(v, std::string(what) + " value");
  }
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    if (std::isnan(x[i])) throw ModelError(std::string(what) + " value missing", tree.node(i).id);
  }
  return x;
}

BoxConstraints read_bounds(const ScenarioTree& tree, const Json& j, const char* what) {
  BoxConstraints box;
  if (j.is_null()) return box;
  if (!j.is_object()) throw ModelError(std::string(what) + " must map node ids to [lo, hi]");
  for (const auto& [id, v] : j.items()) {
    const auto i = tree.lookup(id);
    if (!i) throw ModelError(std::string(what) + " refers to an unknown node", id);
    if (tree.is_leaf(*i)) throw ModelError(std::string(what) + " cannot bound a terminal node", id);
    if (!v.is_array() || v.size() != 2) throw ModelError(std::string(what) + " entry must be [lo, hi]", id);
    Bounds b;
    b.lo = v[0].is_null() ? -kInf : read_number(v[0], what);
    b.hi = v[1].is_null() ? kInf : read_number(v[1], what);
    if (b.lo > b.hi) throw ModelError(std::string(what) + " has lo > hi", id);
    box.set(*i, b);
  }
  return box;
}

Json bound_value(double x) {
  if (std::isinf(x)) return nullptr;
  return x;
}

Json bounds_json(const ScenarioTree& tree, const BoxConstraints& box) {
  Json j = Json::object();
  for (const auto& [node, b] : box.entries()) {
    const Bounds merged = box.get(node);
    j[tree.node(node).id] = Json::array({bound_value(merged.lo), bound_value(merged.hi)});
    (void)b;
  }
  return j;
}

OnePeriodModel read_one_period(const Json& j) {
  OnePeriodModel m;
  m.s0 = need(j, "s0").get<double>();
  m.u = j.contains("utility") ? read_utility(j.at("utility"), nullptr) : ScalarUtility::log();
  const auto& sc = need(j, "scenarios");
  if (!sc.is_array()) throw ModelError("scenarios must be an array");
  for (const auto& s : sc) {
    m.scenarios.push_back({need(s, "p").get<double>(), need(s, "bid1").get<double>(),
                           need(s, "ask1").get<double>()});
  }
  m.validate();
  return m;
}

std::vector<std::string> sorted_ids(const ScenarioTree& tree, const std::vector<NodeIndex>& nodes) {
  std::vector<std::string> ids;
  for (NodeIndex n : nodes) ids.push_back(tree.node(n).id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace

Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

Json node_map(const ScenarioTree& tree, const AdaptedProcess& x) {
  Json j = Json::object();
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    if (x.covers(tree.node(i).t)) j[tree.node(i).id] = number(x[i]);
  }
  return j;
}

Json check(const std::string& tag, double value, double tolerance, bool passed) {
  return {{"tag", tag}, {"value", number(value)}, {"tolerance", tolerance}, {"passed", passed}};
}

ModelDocument model_from_json(const Json& j) {
  try {
    ModelDocument doc;
    if (!j.is_object()) throw ModelError("model must be a JSON object");
    if (j.contains("expected")) doc.expected = j.at("expected");
    if (j.contains("scenarios")) {
      doc.one_period = read_one_period(j);
      return doc;
    }
    const int horizon = need(j, "horizon").get<int>();
    std::vector<NodeSpec> specs;
    for (const auto& n : need(j, "nodes")) {
      NodeSpec s;
      s.id = need(n, "id").get<std::string>();
      s.t = need(n, "t").get<int>();
      s.parent = n.contains("parent") && !n.at("parent").is_null() ? n.at("parent").get<std::string>() : "";
      s.p = need(n, "p").get<double>();
      specs.push_back(std::move(s));
    }
    ScenarioTree tree = ScenarioTree::build(horizon, specs);
    BidAskModel market{read_process(tree, need(j, "bid"), "bid"), read_process(tree, need(j, "ask"), "ask")};
    market.validate(tree);
    UtilityFunctional phi;
    phi.scalar = j.contains("utility") ? read_utility(j.at("utility"), &phi.banach_weight) : ScalarUtility::log();
    SolverOptions opts;
    if (j.contains("options")) {
      const auto& o = j.at("options");
      opts.tol_kkt = o.value("tol_kkt", opts.tol_kkt);
      opts.tol_gap = o.value("tol_gap", opts.tol_gap);
      opts.max_iter = o.value("max_iter", opts.max_iter);
      opts.unbounded_ceiling = o.value("unbounded_ceiling", opts.unbounded_ceiling);
      if (!(opts.tol_gap > 0.0) || !(opts.tol_kkt > 0.0) || opts.max_iter < 1) {
        throw ModelError("solver options must be positive");
      }
    }
    BoxConstraints cons = read_bounds(tree, j.value("constraints", Json()), "constraints");
    BoxConstraints trunc = read_bounds(tree, j.value("truncation_bounds", Json()), "truncation_bounds");
    if (j.contains("candidate")) doc.candidate = read_process(tree, j.at("candidate"), "candidate");
    doc.problem = PrimalProblem{std::move(tree), std::move(market), phi, cons, trunc, opts};
    return doc;
  } catch (const Json::exception& e) {
    throw ModelError(std::string("malformed model: ") + e.what());
  }
}

ModelDocument parse_model(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ModelError(std::string("malformed JSON: ") + e.what());
  }
  return model_from_json(j);
}

Json to_json(const PrimalProblem& problem) {
  const auto& tree = problem.tree;
  Json nodes = Json::array();
  for (const auto& n : tree.nodes()) {
    Json e{{"id", n.id}, {"t", n.t}, {"p", n.p}};
    e["parent"] = n.parent == kRoot ? Json(nullptr) : Json(tree.node(n.parent).id);
    nodes.push_back(std::move(e));
  }
  Json j{{"horizon", tree.horizon()},
         {"nodes", nodes},
         {"bid", node_map(tree, problem.market.bid)},
         {"ask", node_map(tree, problem.market.ask)},
         {"utility", utility_json(problem.phi.scalar, problem.phi.banach_weight)}};
  const auto& o = problem.options;
  j["options"] = {{"tol_kkt", o.tol_kkt}, {"tol_gap", o.tol_gap}, {"max_iter", o.max_iter},
                  {"unbounded_ceiling", o.unbounded_ceiling}};
  if (!problem.constraints.empty()) j["constraints"] = bounds_json(tree, problem.constraints);
  if (!problem.truncation_bounds.empty()) j["truncation_bounds"] = bounds_json(tree, problem.truncation_bounds);
  return j;
}

Json to_json(const OnePeriodModel& model) {
  Json sc = Json::array();
  for (const auto& s : model.scenarios) sc.push_back({{"p", s.p}, {"bid1", s.bid1}, {"ask1", s.ask1}});
  return {{"s0", model.s0}, {"scenarios", sc}, {"utility", utility_json(model.u, 0.0)}};
}

Json to_json(const ExampleInstance& inst) {
  Json j = inst.problem ? to_json(*inst.problem) : to_json(*inst.one_period);
  if (inst.candidate && inst.problem) j["candidate"] = node_map(inst.problem->tree, *inst.candidate);
  Json values = Json::object();
  for (const auto& [k, v] : inst.expected.values) values[k] = number(v);
  Json notes = Json::object();
  for (const auto& [k, v] : inst.expected.notes) notes[k] = v;
  const auto& d = inst.descriptor;
  j["expected"] = {{"example", to_string(d.which)},
                   {"parameters", {{"n", d.n}, {"K", d.K}, {"N", d.N}, {"quad", d.quad}}},
                   {"values", values},
                   {"notes", notes}};
  return j;
}

Json solution_json(const PrimalProblem& problem, const PrimalSolution& sol) {
  const auto& tree = problem.tree;
  const auto& r = sol.residuals;
  Json j{{"status", to_string(sol.status)},
         {"lambda", number(sol.lambda)},
         {"gamma", node_map(tree, sol.gamma_star.gamma)},
         {"residuals",
          {{"gap_bound", number(r.gap_bound)},
           {"newton_decrement", number(r.newton_decrement)},
           {"stationarity", number(r.stationarity)},
           {"wealth_slack", number(r.wealth_slack)},
           {"newton_iterations", r.newton_iterations}}}};
  if (sol.status == SolveStatus::optimal) {
    j["beta"] = node_map(tree, sol.decomposition.beta);
    j["sold"] = node_map(tree, sol.decomposition.sold);
    j["bought"] = node_map(tree, sol.decomposition.bought);
  }
  if (sol.unbounded_direction) j["unbounded_direction"] = node_map(tree, sol.unbounded_direction->gamma);
  if (!sol.message.empty()) j["message"] = sol.message;
  j["checks"] = Json::array({check("barrier-gap", r.gap_bound, problem.options.tol_gap,
                                   sol.status != SolveStatus::optimal || r.gap_bound <= problem.options.tol_gap)});
  return j;
}

Json dual_json(const PrimalProblem& problem, const DualSolution& sol) {
  const auto& tree = problem.tree;
  const auto feas = check_dual(problem, sol.z);
  Json j{{"status", to_string(sol.status)},
         {"value", number(sol.value)},
         {"z1", node_map(tree, sol.z.z1)},
         {"z2", node_map(tree, sol.z.z2)},
         {"strict_margin", number(sol.strict_margin)},
         {"feasibility",
          {{"martingale_violation", number(feas.martingale_violation)},
           {"spread_violation", number(feas.spread_violation)},
           {"min_z1", number(feas.min_z1)}}},
         {"residuals", {{"gap_bound", number(sol.residuals.gap_bound)},
                        {"newton_iterations", sol.residuals.newton_iterations}}}};
  if (!sol.message.empty()) j["message"] = sol.message;
  j["checks"] = Json::array({check("dual-martingale", feas.martingale_violation, 1e-9,
                                   feas.martingale_violation <= 1e-9),
                             check("dual-spread", feas.spread_violation, 1e-9, feas.spread_violation <= 1e-9)});
  return j;
}

Json certificate_json(const PrimalProblem& problem, const ShadowPriceCertificate& cert) {
  const auto& tree = problem.tree;
  Json slack = Json::object();
  std::size_t active = 0, failed = 0;
  for (const auto& e : cert.slackness) {
    slack[tree.node(e.node).id] = {{"dgamma", number(e.increment)}, {"side", e.side},
                                   {"deviation", number(e.deviation)}, {"ok", e.ok}};
    if (e.side != "none") {
      ++active;
      if (!e.ok) ++failed;
    }
  }
  Json j{{"lambda", number(cert.lambda)},
         {"mu_s_star", number(cert.mu)},
         {"gap", number(cert.gap)},
         {"s_star", node_map(tree, cert.s_star)},
         {"degenerate_nodes", sorted_ids(tree, cert.degenerate_nodes)},
         {"outside_spread", sorted_ids(tree, cert.outside_spread)},
         {"slackness_report", slack},
         {"primal_status", to_string(cert.primal_status)},
         {"frictionless_status", to_string(cert.frictionless_status)},
         {"gamma", node_map(tree, cert.gamma_star.gamma)},
         {"passed", cert.passed}};
  if (cert.constrained_mu) j["constrained_mu"] = number(*cert.constrained_mu);
  if (cert.arbitrage && cert.arbitrage->arbitrage) {
    Json a{{"margin", number(cert.arbitrage->margin)}};
    if (cert.arbitrage->certificate) a["strategy"] = node_map(tree, cert.arbitrage->certificate->gamma);
    j["arbitrage"] = a;
  }
  Json checks = Json::array();
  const auto& o = cert.options;
  checks.push_back(check("shadow-gap", cert.gap, o.tol_gap, std::isfinite(cert.gap) && std::abs(cert.gap) <= o.tol_gap));
  checks.push_back(check("within-spread", static_cast<double>(cert.outside_spread.size()), 0.0, cert.within_spread));
  checks.push_back(check("complementary-slackness", static_cast<double>(failed), o.tol_slackness, failed == 0));
  if (cert.constrained_mu) {
    const double d = *cert.constrained_mu - cert.lambda;
    checks.push_back(check("constrained-shadow-gap", d, o.tol_gap, std::isfinite(d) && std::abs(d) <= o.tol_gap));
  }
  j["checks"] = checks;
  j["active_nodes"] = active;
  if (cert.frictionless_status == SolveStatus::unbounded) {
    j["verdict"] = "unbounded frictionless value: the candidate admits arbitrage and is not a shadow price";
  } else if (cert.passed) {
    j["verdict"] = "shadow price";
  } else {
    j["verdict"] = "not a shadow price within tolerance";
  }
  return j;
}

Json minimax_json(const PrimalProblem& problem, const MinimaxReport& rep) {
  const auto& tree = problem.tree;
  const bool order = rep.supinf <= rep.infsup + 1e-12;
  const double dev = std::max(std::abs(rep.supinf - rep.lambda), std::abs(rep.infsup - rep.lambda));
  return {{"supinf", number(rep.supinf)},
          {"infsup", number(rep.infsup)},
          {"lambda", number(rep.lambda)},
          {"tolerance", number(rep.tolerance)},
          {"tol_supinf", number(rep.tol_supinf)},
          {"tol_infsup", number(rep.tol_infsup)},
          {"identity_error", number(rep.identity_error)},
          {"argmin_s", node_map(tree, rep.argmin_s)},
          {"argmax_gamma", node_map(tree, rep.argmax_gamma.gamma)},
          {"evaluations", rep.evaluations},
          {"checks", Json::array({check("weak-minimax-order", rep.supinf - rep.infsup, 1e-12, order),
                                  check("minimax-equality", dev, rep.tolerance, dev <= rep.tolerance + 1e-12),
                                  check("inner-inf-identity", rep.identity_error, 1e-10,
                                        rep.identity_error <= 1e-10)})}};
}

Json saddle_json(const OnePeriodModel& model, const SaddlePoint& sp, const SaddleReport& rep,
                 const GridMaximum& grid_lambda) {
  (void)model;
  const double dev = std::abs(rep.value - grid_lambda.value);
  return {{"gamma0", sp.gamma0},
          {"s1", sp.s1},
          {"branch", to_string(sp.branch)},
          {"theta", sp.theta},
          {"foc_residual", sp.foc_residual},
          {"value", number(rep.value)},
          {"left_violation", number(rep.left_violation)},
          {"right_violation", number(rep.right_violation)},
          {"grid_lambda", number(grid_lambda.value)},
          {"grid_tolerance", grid_lambda.tolerance},
          {"checks", Json::array({check("saddle-left", rep.left_violation, rep.tol, rep.left_violation <= rep.tol),
                                  check("saddle-right", rep.right_violation, rep.tol, rep.right_violation <= rep.tol),
                                  check("saddle-value", dev, 2.0 * grid_lambda.tolerance,
                                        dev <= 2.0 * grid_lambda.tolerance + 1e-12)})}};
}

namespace {

std::string csv_value(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::string report_csv(const PrimalProblem* problem, const Json& report) {
  // (quantity, node id) -> (t, value); std::map gives the canonical order
  std::map<std::pair<std::string, std::string>, std::pair<std::string, std::string>> rows;
  auto is_node_map = [&](const Json& j) {
    if (!problem || !j.is_object() || j.empty()) return false;
    for (const auto& [k, v] : j.items()) {
      if (!problem->tree.lookup(k)) return false;
    }
    return true;
  };
  std::function<void(const std::string&, const Json&)> walk = [&](const std::string& name, const Json& j) {
    if (is_node_map(j)) {
      for (const auto& [id, v] : j.items()) {
        const int t = problem->tree.node(*problem->tree.lookup(id)).t;
        if (v.is_object()) {
          for (const auto& [field, fv] : v.items()) {
            rows[{name + "." + field, id}] = {std::to_string(t), csv_value(fv)};
          }
        } else {
          rows[{name, id}] = {std::to_string(t), csv_value(v)};
        }
      }
    } else if (j.is_object()) {
      for (const auto& [k, v] : j.items()) walk(name.empty() ? k : name + "." + k, v);
    } else if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        if (e.is_object() && e.contains("tag")) {
          walk(name + "." + e.at("tag").get<std::string>(), Json{{"value", e.at("value")}, {"passed", e.at("passed")}});
        } else {
          walk(name + "[" + std::to_string(i) + "]", e);
        }
      }
    } else {
      rows[{name, ""}] = {"", csv_value(j)};
    }
  };
  walk("", report);
  std::ostringstream os;
  os << "quantity,node_id,t,value\n";
  for (const auto& [key, val] : rows) os << key.first << ',' << key.second << ',' << val.first << ',' << val.second << '\n';
  return os.str();
}

}  // namespace shadowprice
