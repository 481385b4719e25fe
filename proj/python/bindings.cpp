#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shadowprice/acceptance.hpp"
#include "shadowprice/errors.hpp"
#include "shadowprice/model_io.hpp"

namespace py = pybind11;
namespace sp = shadowprice;

namespace {

sp::PrimalProblem tree_model(const std::string& text) {
  auto doc = sp::parse_model(text);
  if (!doc.problem) throw sp::ModelError("expected a scenario-tree model");
  return *doc.problem;
}

std::string solve(const std::string& model) {
  const auto p = tree_model(model);
  return sp::solution_json(p, sp::solve_primal(p)).dump();
}

std::string dual(const std::string& model) {
  const auto p = tree_model(model);
  return sp::dual_json(p, sp::solve_dual(p)).dump();
}

std::string shadow(const std::string& model, const std::string& candidate, double tol_gap) {
  auto doc = sp::parse_model(model);
  if (!doc.problem) throw sp::ModelError("expected a scenario-tree model");
  const auto& p = *doc.problem;
  sp::AdaptedProcess s;
  if (candidate == "paper") {
    if (!doc.candidate) throw sp::ModelError("model carries no candidate price");
    s = *doc.candidate;
  } else if (candidate == "dual") {
    const auto d = sp::solve_dual(p);
    if (d.status != sp::SolveStatus::optimal) throw sp::ModelError("dual problem not solved: " + d.message);
    s = sp::extract_shadow_price(p.tree, p.market, d.z).s_star;
  } else {
    throw sp::ConfigurationError("candidate must be 'dual' or 'paper'");
  }
  sp::VerifyOptions vo;
  vo.tol_gap = tol_gap;
  return sp::certificate_json(p, sp::verify_shadow(p, s, vo)).dump();
}

std::string minimax(const std::string& model, int s_points, double gamma_lo, double gamma_hi,
                    double gamma_step, double budget) {
  const auto p = tree_model(model);
  sp::GridSpec g;
  g.s_points = s_points;
  g.gamma_lo = gamma_lo;
  g.gamma_hi = gamma_hi;
  g.gamma_step = gamma_step;
  g.budget = budget;
  return sp::minimax_json(p, sp::brute_force_minimax(p, g)).dump();
}

std::string saddle(const std::string& model, int gamma_points, int s_points) {
  auto doc = sp::parse_model(model);
  if (!doc.one_period) throw sp::ModelError("expected a one-period model");
  const auto& m = *doc.one_period;
  const auto pt = sp::saddle_point_conditions(m);
  const auto [dlo, dhi] = sp::frictional_domain(m);
  const double lo = std::max(pt.gamma0 - 1.0, dlo + 1e-9);
  const double hi = std::min(pt.gamma0 + 1.0, dhi - 1e-9);
  const auto rep = sp::verify_saddle(m, pt.gamma0, pt.s1, {lo, hi, gamma_points, s_points}, 1e-8);
  return sp::saddle_json(m, pt, rep, sp::frictional_grid_lambda(m, lo, hi, gamma_points)).dump();
}

std::string build_example(const std::string& name, int n, int K, int N, int quad) {
  sp::ExampleDescriptor d;
  d.which = sp::example_from_string(name);
  d.n = n;
  d.K = K;
  d.N = N;
  d.quad = quad;
  return sp::to_json(sp::build_example(d)).dump();
}

double conjugate(const std::string& kind, double param, double x) {
  return sp::ScalarUtility::make(sp::utility_kind_from_string(kind), param).conjugate(x);
}

std::vector<py::dict> verify_all(std::uint64_t seed) {
  sp::AcceptanceOptions o;
  o.seed = seed;
  std::vector<py::dict> out;
  for (const auto& r : sp::run_acceptance(o)) {
    py::dict d;
    d["id"] = r.id;
    d["name"] = r.name;
    d["passed"] = r.passed;
    d["detail"] = r.detail;
    d["failures"] = r.failures;
    d["seconds"] = r.seconds;
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Shadow prices for bid/ask markets on finite scenario trees (JSON in, JSON out)";

  py::register_exception<sp::ModelError>(m, "ModelError", PyExc_ValueError);
  py::register_exception<sp::ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<sp::BudgetExceeded>(m, "BudgetExceeded", PyExc_ValueError);
  py::register_exception<sp::DomainError>(m, "DomainError", PyExc_ValueError);

  m.def("solve", &solve, py::arg("model"), "Optimal strategy and value under transaction costs.");
  m.def("dual", &dual, py::arg("model"), "Dual problem over martingale pairs.");
  m.def("shadow", &shadow, py::arg("model"), py::arg("candidate") = "dual", py::arg("tol_gap") = 1e-6,
        "Shadow-price certificate for the dual-extracted or the model's candidate price.");
  m.def("minimax", &minimax, py::arg("model"), py::arg("s_points") = 5, py::arg("gamma_lo") = -2.0,
        py::arg("gamma_hi") = 2.0, py::arg("gamma_step") = 0.02, py::arg("budget") = 1e7,
        py::call_guard<py::gil_scoped_release>());
  m.def("saddle", &saddle, py::arg("model"), py::arg("gamma_points") = 200, py::arg("s_points") = 200);
  m.def("build_example", &build_example, py::arg("name"), py::arg("n") = 8, py::arg("K") = 6,
        py::arg("N") = 10, py::arg("quad") = 16);
  m.def("conjugate", &conjugate, py::arg("kind"), py::arg("param"), py::arg("x"));
  m.def("verify_all", &verify_all, py::arg("seed") = 20240611);
}
