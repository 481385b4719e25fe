#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "shadowprice/sequence.hpp"

namespace shadowprice {

using NodeIndex = int;
inline constexpr NodeIndex kRoot = -1;  // parent marker of time-0 nodes

/// Node as it appears in a model file. `parent` is empty for time-0 nodes.
struct NodeSpec {
  std::string id;
  int t = 0;
  std::string parent;
  double p = 0.0;
};

struct Node {
  std::string id;
  int t = 0;
  NodeIndex parent = kRoot;
  double p = 0.0;
  std::vector<NodeIndex> children;
};

/// Finite filtered probability space. Atoms of F_t are the time-t nodes; the
/// virtual time -1 root is trivial. Nodes are stored layer by layer so that the
/// leaves below any node form a contiguous range.
class ScenarioTree {
 public:
  /// Validates and builds. Throws ModelError naming the offending node.
  static ScenarioTree build(int horizon, const std::vector<NodeSpec>& nodes);

  int horizon() const noexcept { return horizon_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(NodeIndex i) const { return nodes_.at(static_cast<std::size_t>(i)); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }

  std::span<const NodeIndex> layer(int t) const { return layers_.at(static_cast<std::size_t>(t)); }
  std::span<const NodeIndex> leaves() const { return layers_.back(); }
  std::size_t leaf_count() const noexcept { return layers_.back().size(); }
  bool is_leaf(NodeIndex i) const { return node(i).t == horizon_; }

  /// Position of a terminal node within leaves().
  std::size_t leaf_position(NodeIndex leaf) const;
  /// Leaf positions [first, last) below node i.
  std::pair<std::size_t, std::size_t> leaf_range(NodeIndex i) const {
    return leaf_ranges_.at(static_cast<std::size_t>(i));
  }
  /// Nodes from time 0 down to the given leaf position.
  std::span<const NodeIndex> path(std::size_t leaf_pos) const { return paths_.at(leaf_pos); }

  std::optional<NodeIndex> lookup(std::string_view id) const;
  /// Throws ModelError if the id is unknown.
  NodeIndex find(std::string_view id) const;

  /// Leaf probabilities in leaves() order.
  std::vector<double> leaf_probabilities() const;

 private:
  int horizon_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::vector<NodeIndex>> layers_;
  std::vector<std::pair<std::size_t, std::size_t>> leaf_ranges_;
  std::vector<std::vector<NodeIndex>> paths_;
  std::unordered_map<std::string, NodeIndex> index_;
};

/// One real value per node for the time layers [first_time, last_time].
/// Values outside the covered layers are NaN.
class AdaptedProcess {
 public:
  AdaptedProcess() = default;
  AdaptedProcess(const ScenarioTree& tree, int first_time, int last_time, double fill = 0.0);
  /// Process over all layers 0..T.
  static AdaptedProcess full(const ScenarioTree& tree, double fill = 0.0) {
    return {tree, 0, tree.horizon(), fill};
  }

  int first_time() const noexcept { return first_; }
  int last_time() const noexcept { return last_; }
  bool covers(int t) const noexcept { return t >= first_ && t <= last_; }
  std::size_t size() const noexcept { return values_.size(); }

  double operator[](NodeIndex i) const { return values_.at(static_cast<std::size_t>(i)); }
  double& operator[](NodeIndex i) { return values_.at(static_cast<std::size_t>(i)); }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  int first_ = 0;
  int last_ = -1;
  std::vector<double> values_;
};

/// 0 < bid <= ask at every node of layers 0..T.
struct BidAskModel {
  AdaptedProcess bid;
  AdaptedProcess ask;

  /// Throws ModelError naming the first offending node.
  void validate(const ScenarioTree& tree) const;
  double spread(NodeIndex i) const { return ask[i] - bid[i]; }
};

/// Stock holdings gamma_t, t = 0..T-1, with gamma_{-1} = gamma_T = 0 implicit.
struct Strategy {
  AdaptedProcess gamma;

  static Strategy zero(const ScenarioTree& tree) {
    return {AdaptedProcess(tree, 0, tree.horizon() - 1, 0.0)};
  }
  /// Holding at node i, with the forced-liquidation value 0 on leaves.
  double holding(const ScenarioTree& tree, NodeIndex i) const {
    return tree.is_leaf(i) ? 0.0 : gamma[i];
  }
  /// gamma_t - gamma_{t-1} at node i.
  double increment(const ScenarioTree& tree, NodeIndex i) const;
};

/// Terminal (time-T) random variable: one value per leaf, possibly -inf.
/// `tail`, when present, extends the leaves to an infinite almost convergent
/// sequence indexed by outcome (used by the Banach-limit functional).
struct RandomVariable {
  std::vector<double> values;
  std::optional<AlmostConvergentSequence> tail;
};

/// 1 + sum_t (bid_t (dgamma_t)^- - ask_t (dgamma_t)^+), path-wise, with dgamma_T = -gamma_{T-1}.
RandomVariable terminal_wealth(const ScenarioTree& tree, const BidAskModel& market,
                               const Strategy& strategy);

/// 1 + sum_{t=1}^T gamma_{t-1} (S_t - S_{t-1}), path-wise.
RandomVariable frictionless_wealth(const ScenarioTree& tree, const AdaptedProcess& price,
                                   const Strategy& strategy);

/// E(rv | F_t) as a process covering layer t only.
AdaptedProcess conditional_expectation(const ScenarioTree& tree, const RandomVariable& rv, int t);
/// E(X_u | F_s) for a process X covering layer u >= s; result covers layer s only.
AdaptedProcess conditional_expectation(const ScenarioTree& tree, const AdaptedProcess& x, int u,
                                       int s);

struct MartingaleCheck {
  bool is_martingale = true;
  double max_violation = 0.0;
  NodeIndex worst_node = kRoot;
};

/// |E(Z_{t+1} - Z_t | F_t)| <= tol at every non-terminal node.
MartingaleCheck is_martingale(const ScenarioTree& tree, const AdaptedProcess& process, double tol);

/// Structural check that a process covers [first, last] on this tree.
void require_coverage(const ScenarioTree& tree, const AdaptedProcess& x, int first, int last,
                      const char* what);

}  // namespace shadowprice
