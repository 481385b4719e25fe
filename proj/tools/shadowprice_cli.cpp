#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

#include "shadowprice/acceptance.hpp"
#include "shadowprice/errors.hpp"
#include "shadowprice/model_io.hpp"

namespace sp = shadowprice;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNoConvergence = 3;
constexpr int kVerification = 4;

struct Config {
  std::string model = "-";
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 20240611;
  double tol_gap = 1e-6;
  int grid_s = 5;          // minimax: points per node
  int saddle_s = 200;      // saddle: points per scenario
  std::string grid_gamma;  // "lo:hi:step"
  double budget = 1e7;
  std::string candidate = "dual";
  std::string example;
  int n = 8, K = 6, N = 10, quad = 16;
};

std::string read_input(const std::string& path) {
  if (path == "-" || path.empty()) {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path);
  if (!in) throw sp::ModelError("cannot open model file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const Config& cfg, const sp::PrimalProblem* problem, const sp::Json& report) {
  const std::string text = cfg.format == "csv" ? sp::report_csv(problem, report) : report.dump(2) + "\n";
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(cfg.out);
    if (!f) throw sp::ConfigurationError("cannot write '" + cfg.out + "'");
    f << text;
  }
}

sp::PrimalProblem need_problem(const sp::ModelDocument& doc) {
  if (!doc.problem) throw sp::ModelError("this command needs a scenario-tree model");
  return *doc.problem;
}

// "lo:hi:step"
void parse_gamma_grid(const std::string& text, double& lo, double& hi, double& step) {
  std::istringstream is(text);
  char c1 = 0, c2 = 0;
  if (!(is >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(hi > lo) || !(step > 0.0)) {
    throw sp::ConfigurationError("--grid-gamma expects lo:hi:step with lo < hi and step > 0");
  }
}

int cmd_solve(const Config& cfg) {
  const auto doc = sp::parse_model(read_input(cfg.model));
  const auto problem = need_problem(doc);
  const auto sol = sp::solve_primal(problem);
  emit(cfg, &problem, sp::solution_json(problem, sol));
  return sol.status == sp::SolveStatus::max_iter ? kNoConvergence : kOk;
}

int cmd_dual(const Config& cfg) {
  const auto doc = sp::parse_model(read_input(cfg.model));
  const auto problem = need_problem(doc);
  const auto sol = sp::solve_dual(problem);
  auto report = sp::dual_json(problem, sol);
  if (sol.status == sp::SolveStatus::optimal) {
    const auto primal = sp::solve_primal(problem);
    const double gap = std::abs(sol.value + primal.lambda);
    report["lambda"] = sp::number(primal.lambda);
    report["checks"].push_back(sp::check("strong-duality", gap, cfg.tol_gap, gap <= cfg.tol_gap));
  }
  emit(cfg, &problem, report);
  return sol.status == sp::SolveStatus::max_iter ? kNoConvergence : kOk;
}

int cmd_shadow(const Config& cfg) {
  const auto doc = sp::parse_model(read_input(cfg.model));
  const auto problem = need_problem(doc);
  sp::AdaptedProcess s_star;
  std::vector<sp::NodeIndex> degenerate;
  if (cfg.candidate == "paper") {
    if (!doc.candidate) throw sp::ModelError("model carries no candidate price (use --candidate dual)");
    s_star = *doc.candidate;
  } else {
    const auto dual = sp::solve_dual(problem);
    if (dual.status == sp::SolveStatus::max_iter) {
      std::cerr << "dual solver did not converge: " << dual.message << "\n";
      return kNoConvergence;
    }
    if (dual.status != sp::SolveStatus::optimal) {
      throw sp::ModelError("no consistent price system: the dual problem is infeasible");
    }
    auto ex = sp::extract_shadow_price(problem.tree, problem.market, dual.z);
    s_star = ex.s_star;
    degenerate = ex.degenerate_nodes;
  }
  sp::VerifyOptions vo;
  vo.tol_gap = cfg.tol_gap;
  auto cert = sp::verify_shadow(problem, s_star, vo);
  if (cert.degenerate_nodes.empty()) cert.degenerate_nodes = degenerate;
  auto report = sp::certificate_json(problem, cert);
  report["candidate"] = cfg.candidate;
  emit(cfg, &problem, report);
  if (cert.primal_status == sp::SolveStatus::max_iter) return kNoConvergence;
  if (!cert.passed) {
    std::cerr << report.value("verdict", std::string("verification failed")) << "\n";
    return kVerification;
  }
  return kOk;
}

int cmd_minimax(const Config& cfg) {
  const auto doc = sp::parse_model(read_input(cfg.model));
  const auto problem = need_problem(doc);
  sp::GridSpec spec;
  spec.s_points = cfg.grid_s;
  spec.budget = cfg.budget;
  if (!cfg.grid_gamma.empty()) parse_gamma_grid(cfg.grid_gamma, spec.gamma_lo, spec.gamma_hi, spec.gamma_step);
  const auto rep = sp::brute_force_minimax(problem, spec);
  const auto report = sp::minimax_json(problem, rep);
  emit(cfg, &problem, report);
  for (const auto& c : report.at("checks")) {
    if (!c.at("passed").get<bool>()) return kVerification;
  }
  return kOk;
}

int cmd_saddle(const Config& cfg) {
  const auto doc = sp::parse_model(read_input(cfg.model));
  if (!doc.one_period) throw sp::ModelError("saddle needs a one-period model (s0, scenarios, utility)");
  const auto& m = *doc.one_period;
  const auto point = sp::saddle_point_conditions(m);
  const auto [dlo, dhi] = sp::frictional_domain(m);
  double lo = std::max(point.gamma0 - 1.0, dlo + 1e-9);
  double hi = std::min(point.gamma0 + 1.0, dhi - 1e-9);
  int gamma_points = 200;
  if (!cfg.grid_gamma.empty()) {
    double step = 0.0;
    parse_gamma_grid(cfg.grid_gamma, lo, hi, step);
    gamma_points = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  }
  const int s_points = cfg.saddle_s;
  const double cost = static_cast<double>(gamma_points) * 2.0 + static_cast<double>(s_points) * m.scenarios.size();
  if (cost > cfg.budget) throw sp::BudgetExceeded(cost, cfg.budget);
  const auto rep = sp::verify_saddle(m, point.gamma0, point.s1, sp::SaddleGrid{lo, hi, gamma_points, s_points}, 1e-8);
  const auto grid = sp::frictional_grid_lambda(m, lo, hi, gamma_points);
  const auto report = sp::saddle_json(m, point, rep, grid);
  emit(cfg, nullptr, report);
  for (const auto& c : report.at("checks")) {
    if (!c.at("passed").get<bool>()) return kVerification;
  }
  return kOk;
}

int cmd_examples(const Config& cfg) {
  sp::ExampleDescriptor d;
  d.which = sp::example_from_string(cfg.example);
  d.n = cfg.n;
  d.K = cfg.K;
  d.N = cfg.N;
  d.quad = cfg.quad;
  const auto inst = sp::build_example(d);
  Config json_only = cfg;
  json_only.format = "json";
  emit(json_only, nullptr, sp::to_json(inst));
  return kOk;
}

int cmd_verify_all(const Config& cfg) {
  sp::AcceptanceOptions o;
  o.seed = cfg.seed;
  const auto results = sp::run_acceptance(o);
  sp::print_results(std::cout, results);
  for (const auto& r : results) {
    if (!r.passed) return kVerification;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shadow prices, duality and minimax checks for bid/ask markets on scenario trees"};
  app.require_subcommand(1);
  Config cfg;

  auto add_io = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "model JSON file, '-' for stdin")->capture_default_str();
    sub->add_option("--out", cfg.out, "write the report here instead of stdout");
    sub->add_option("--format", cfg.format, "report format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  };
  auto* solve = app.add_subcommand("solve", "maximize expected utility under transaction costs");
  add_io(solve);
  auto* dual = app.add_subcommand("dual", "solve the dual problem over martingale pairs");
  add_io(dual);
  dual->add_option("--tol-gap", cfg.tol_gap, "duality gap tolerance")->capture_default_str();
  auto* shadow = app.add_subcommand("shadow", "build and certify a shadow price");
  add_io(shadow);
  shadow->add_option("--tol-gap", cfg.tol_gap, "tolerance on |mu - lambda|")->capture_default_str();
  shadow->add_option("--candidate", cfg.candidate, "dual: extract from the dual; paper: use the model's candidate")
      ->check(CLI::IsMember({"dual", "paper"}))
      ->capture_default_str();
  auto* minimax = app.add_subcommand("minimax", "grid sup-inf / inf-sup of the frictionless utility");
  add_io(minimax);
  minimax->add_option("--grid-s", cfg.grid_s, "points per node across [bid, ask]")->capture_default_str();
  minimax->add_option("--grid-gamma", cfg.grid_gamma, "holding grid lo:hi:step (default -2:2:0.02)");
  minimax->add_option("--budget", cfg.budget, "maximum number of evaluations")->capture_default_str();
  auto* saddle = app.add_subcommand("saddle", "one-period saddle point of the relaxed utility");
  add_io(saddle);
  saddle->add_option("--grid-s", cfg.saddle_s, "points per scenario across [bid1, ask1]")->capture_default_str();
  saddle->add_option("--grid-gamma", cfg.grid_gamma, "holding grid lo:hi:step (default g* +/- 1, 200 points)");
  saddle->add_option("--budget", cfg.budget, "maximum number of evaluations")->capture_default_str();
  auto* examples = app.add_subcommand("examples", "built-in example instances");
  auto* build = examples->add_subcommand("build", "emit an example model with its expected diagnostics");
  examples->require_subcommand(1);
  build->add_option("name", cfg.example, "example3, example4 or example5")->required();
  build->add_option("--n", cfg.n, "example5 probability scale")->capture_default_str();
  build->add_option("--K", cfg.K, "example5 last atom")->capture_default_str();
  build->add_option("--N", cfg.N, "example4 number of atoms")->capture_default_str();
  build->add_option("--quad", cfg.quad, "example3 number of scenarios")->capture_default_str();
  build->add_option("--out", cfg.out, "output file");
  auto* verify = app.add_subcommand("verify-all", "run every acceptance criterion");
  verify->add_option("--seed", cfg.seed, "seed for randomized instances")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (*solve) return cmd_solve(cfg);
    if (*dual) return cmd_dual(cfg);
    if (*shadow) return cmd_shadow(cfg);
    if (*minimax) return cmd_minimax(cfg);
    if (*saddle) return cmd_saddle(cfg);
    if (*examples) return cmd_examples(cfg);
    if (*verify) return cmd_verify_all(cfg);
  } catch (const sp::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const sp::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const sp::ConfigurationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const sp::StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const sp::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNoConvergence;
  }
  return kValidation;
}
