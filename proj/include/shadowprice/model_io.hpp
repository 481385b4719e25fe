#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "shadowprice/dual.hpp"
#include "shadowprice/examples.hpp"
#include "shadowprice/minimax.hpp"
#include "shadowprice/primal.hpp"
#include "shadowprice/relaxation.hpp"

namespace shadowprice {

using Json = nlohmann::json;

/// Contents of a model file: either a scenario-tree problem or a one-period
/// model, plus the optional candidate price and expected diagnostics written by
/// the example builders.
struct ModelDocument {
  std::optional<PrimalProblem> problem;
  std::optional<OnePeriodModel> one_period;
  std::optional<AdaptedProcess> candidate;
  Json expected;  // null when absent
};

/// Parses and validates. Malformed JSON and invalid content both raise ModelError.
ModelDocument parse_model(const std::string& text);
ModelDocument model_from_json(const Json& j);

Json to_json(const PrimalProblem& problem);
Json to_json(const OnePeriodModel& model);
Json to_json(const ExampleInstance& inst);

/// Extended reals as JSON: finite numbers as is, otherwise "inf", "-inf" or "nan".
Json number(double x);

/// {node id: value} for the layers the process covers, sorted by id.
Json node_map(const ScenarioTree& tree, const AdaptedProcess& x);

/// One verification check with its tag and tolerance.
Json check(const std::string& tag, double value, double tolerance, bool passed);

Json solution_json(const PrimalProblem& problem, const PrimalSolution& sol);
Json dual_json(const PrimalProblem& problem, const DualSolution& sol);
Json certificate_json(const PrimalProblem& problem, const ShadowPriceCertificate& cert);
Json minimax_json(const PrimalProblem& problem, const MinimaxReport& rep);
Json saddle_json(const OnePeriodModel& model, const SaddlePoint& sp, const SaddleReport& rep,
                 const GridMaximum& grid_lambda);

/// Flattens every per-node object of a report into CSV rows
/// "quantity,node_id,t,value" sorted by quantity then node id. Scalars become
/// rows with empty node id and t.
std::string report_csv(const PrimalProblem* problem, const Json& report);

}  // namespace shadowprice
