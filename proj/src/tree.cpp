#include "shadowprice/tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "shadowprice/errors.hpp"

namespace shadowprice {

namespace {

constexpr double kMinProbability = 1e-300;
constexpr double kProbabilityTol = 1e-12;

}  // namespace

ScenarioTree ScenarioTree::build(int horizon, const std::vector<NodeSpec>& specs) {
  if (horizon < 1) throw ModelError("horizon must be >= 1");
  if (specs.empty()) throw ModelError("tree has no nodes");

  std::unordered_map<std::string, std::size_t> by_id;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& s = specs[k];
    if (s.id.empty()) throw ModelError("empty node id");
    if (!by_id.emplace(s.id, k).second) throw ModelError("duplicate node id", s.id);
    if (s.t < 0 || s.t > horizon) throw ModelError("time index outside [0, horizon]", s.id);
    if (!std::isfinite(s.p) || s.p <= 0.0) throw ModelError("probability must be positive", s.id);
    if (s.p < kMinProbability) throw ModelError("probability below 1e-300", s.id);
  }

  // children lists in input order, validated parent links
  std::vector<std::vector<std::size_t>> kids(specs.size());
  std::vector<std::size_t> roots;
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const auto& s = specs[k];
    if (s.t == 0) {
      if (!s.parent.empty()) throw ModelError("time-0 node must not have a parent", s.id);
      roots.push_back(k);
      continue;
    }
    auto it = by_id.find(s.parent);
    if (s.parent.empty() || it == by_id.end()) throw ModelError("unknown parent", s.id);
    if (specs[it->second].t != s.t - 1) throw ModelError("parent is not at time t-1", s.id);
    kids[it->second].push_back(k);
  }

  ScenarioTree tree;
  tree.horizon_ = horizon;
  tree.layers_.resize(static_cast<std::size_t>(horizon) + 1);
  std::vector<NodeIndex> new_index(specs.size(), kRoot);

  auto append = [&](std::size_t k, NodeIndex parent) {
    const auto& s = specs[k];
    auto idx = static_cast<NodeIndex>(tree.nodes_.size());
    new_index[k] = idx;
    tree.nodes_.push_back(Node{s.id, s.t, parent, s.p, {}});
    tree.layers_[static_cast<std::size_t>(s.t)].push_back(idx);
    if (parent != kRoot) tree.nodes_[static_cast<std::size_t>(parent)].children.push_back(idx);
  };

  for (auto k : roots) append(k, kRoot);
  for (int t = 0; t < horizon; ++t) {
    // copy: layers_[t] is stable while appending to t+1
    const auto layer = tree.layers_[static_cast<std::size_t>(t)];
    for (NodeIndex i : layer) {
      const auto& id = tree.nodes_[static_cast<std::size_t>(i)].id;
      for (auto k : kids[by_id.at(id)]) append(k, i);
    }
  }

  // validation of the probability structure
  for (int t = 0; t <= horizon; ++t) {
    const auto& layer = tree.layers_[static_cast<std::size_t>(t)];
    if (layer.empty()) {
      throw ModelError("layer t=" + std::to_string(t) + " is empty");
    }
    double total = 0.0;
    for (NodeIndex i : layer) total += tree.nodes_[static_cast<std::size_t>(i)].p;
    if (std::abs(total - 1.0) > kProbabilityTol) {
      std::ostringstream os;
      os.precision(17);
      os << "probabilities at t=" << t << " sum to " << total << ", expected 1";
      throw ModelError(os.str(), tree.nodes_[static_cast<std::size_t>(layer.front())].id);
    }
  }
  for (const auto& n : tree.nodes_) {
    if (n.t == horizon) continue;
    if (n.children.empty()) throw ModelError("non-terminal node has no children", n.id);
    double sum = 0.0;
    for (NodeIndex c : n.children) sum += tree.nodes_[static_cast<std::size_t>(c)].p;
    if (std::abs(sum - n.p) > kProbabilityTol * n.p) {
      std::ostringstream os;
      os.precision(17);
      os << "children probabilities sum to " << sum << " but node has " << n.p;
      throw ModelError(os.str(), n.id);
    }
  }
  if (tree.nodes_.size() != specs.size()) throw ModelError("nodes unreachable from time 0");

  for (std::size_t k = 0; k < tree.nodes_.size(); ++k) {
    tree.index_.emplace(tree.nodes_[k].id, static_cast<NodeIndex>(k));
  }

  // leaf ranges, bottom-up
  const auto& leaves = tree.layers_.back();
  tree.leaf_ranges_.assign(tree.nodes_.size(), {0, 0});
  for (std::size_t pos = 0; pos < leaves.size(); ++pos) {
    tree.leaf_ranges_[static_cast<std::size_t>(leaves[pos])] = {pos, pos + 1};
  }
  for (int t = horizon - 1; t >= 0; --t) {
    for (NodeIndex i : tree.layers_[static_cast<std::size_t>(t)]) {
      const auto& ch = tree.nodes_[static_cast<std::size_t>(i)].children;
      tree.leaf_ranges_[static_cast<std::size_t>(i)] = {
          tree.leaf_ranges_[static_cast<std::size_t>(ch.front())].first,
          tree.leaf_ranges_[static_cast<std::size_t>(ch.back())].second};
    }
  }

  tree.paths_.resize(leaves.size());
  for (std::size_t pos = 0; pos < leaves.size(); ++pos) {
    auto& path = tree.paths_[pos];
    for (NodeIndex i = leaves[pos]; i != kRoot; i = tree.nodes_[static_cast<std::size_t>(i)].parent) {
      path.push_back(i);
    }
    std::reverse(path.begin(), path.end());
  }
  return tree;
}

std::size_t ScenarioTree::leaf_position(NodeIndex leaf) const {
  if (!is_leaf(leaf)) throw StructuralError("node is not terminal: " + node(leaf).id);
  return leaf_range(leaf).first;
}

std::optional<NodeIndex> ScenarioTree::lookup(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex ScenarioTree::find(std::string_view id) const {
  if (auto i = lookup(id)) return *i;
  throw ModelError("unknown node id", std::string(id));
}

std::vector<double> ScenarioTree::leaf_probabilities() const {
  std::vector<double> p;
  p.reserve(leaf_count());
  for (NodeIndex l : leaves()) p.push_back(node(l).p);
  return p;
}

AdaptedProcess::AdaptedProcess(const ScenarioTree& tree, int first_time, int last_time, double fill)
    : first_(first_time),
      last_(last_time),
      values_(tree.size(), std::numeric_limits<double>::quiet_NaN()) {
  if (first_time < 0 || last_time > tree.horizon() || first_time > last_time + 1) {
    throw StructuralError("process coverage outside the tree horizon");
  }
  for (int t = first_time; t <= last_time; ++t) {
    for (NodeIndex i : tree.layer(t)) values_[static_cast<std::size_t>(i)] = fill;
  }
}

void require_coverage(const ScenarioTree& tree, const AdaptedProcess& x, int first, int last,
                      const char* what) {
  if (x.size() != tree.size()) {
    throw StructuralError(std::string(what) + ": process has " + std::to_string(x.size()) +
                          " nodes, tree has " + std::to_string(tree.size()));
  }
  if (first > last) return;
  if (!x.covers(first) || !x.covers(last)) {
    throw StructuralError(std::string(what) + ": process must cover t=" + std::to_string(first) +
                          ".." + std::to_string(last));
  }
}

void BidAskModel::validate(const ScenarioTree& tree) const {
  require_coverage(tree, bid, 0, tree.horizon(), "bid");
  require_coverage(tree, ask, 0, tree.horizon(), "ask");
  for (NodeIndex i = 0; i < static_cast<NodeIndex>(tree.size()); ++i) {
    const auto& id = tree.node(i).id;
    if (!std::isfinite(bid[i]) || !std::isfinite(ask[i])) throw ModelError("non-finite price", id);
    if (bid[i] <= 0.0) throw ModelError("bid must be positive", id);
    if (bid[i] > ask[i]) throw ModelError("bid exceeds ask", id);
  }
}

double Strategy::increment(const ScenarioTree& tree, NodeIndex i) const {
  const auto& n = tree.node(i);
  const double prev = n.parent == kRoot ? 0.0 : gamma[n.parent];
  return holding(tree, i) - prev;
}

namespace {

void require_strategy(const ScenarioTree& tree, const Strategy& s) {
  require_coverage(tree, s.gamma, 0, tree.horizon() - 1, "strategy");
  for (int t = 0; t < tree.horizon(); ++t) {
    for (NodeIndex i : tree.layer(t)) {
      if (!std::isfinite(s.gamma[i])) throw ModelError("non-finite holding", tree.node(i).id);
    }
  }
}

}  // namespace

RandomVariable terminal_wealth(const ScenarioTree& tree, const BidAskModel& market,
                               const Strategy& strategy) {
  require_coverage(tree, market.bid, 0, tree.horizon(), "bid");
  require_coverage(tree, market.ask, 0, tree.horizon(), "ask");
  require_strategy(tree, strategy);
  RandomVariable out;
  out.values.resize(tree.leaf_count());
  for (std::size_t pos = 0; pos < tree.leaf_count(); ++pos) {
    double x = 1.0;
    for (NodeIndex i : tree.path(pos)) {
      const double d = strategy.increment(tree, i);
      if (d < 0.0) {
        x += market.bid[i] * (-d);
      } else if (d > 0.0) {
        x -= market.ask[i] * d;
      }
    }
    out.values[pos] = x;
  }
  return out;
}

RandomVariable frictionless_wealth(const ScenarioTree& tree, const AdaptedProcess& price,
                                   const Strategy& strategy) {
  require_coverage(tree, price, 0, tree.horizon(), "price");
  require_strategy(tree, strategy);
  RandomVariable out;
  out.values.resize(tree.leaf_count());
  for (std::size_t pos = 0; pos < tree.leaf_count(); ++pos) {
    double x = 1.0;
    const auto path = tree.path(pos);
    for (std::size_t k = 1; k < path.size(); ++k) {
      x += strategy.gamma[path[k - 1]] * (price[path[k]] - price[path[k - 1]]);
    }
    out.values[pos] = x;
  }
  return out;
}

AdaptedProcess conditional_expectation(const ScenarioTree& tree, const RandomVariable& rv, int t) {
  if (rv.values.size() != tree.leaf_count()) {
    throw StructuralError("random variable has " + std::to_string(rv.values.size()) +
                          " values, tree has " + std::to_string(tree.leaf_count()) + " leaves");
  }
  if (t < 0 || t > tree.horizon()) throw StructuralError("time index outside [0, horizon]");
  AdaptedProcess out(tree, t, t);
  const auto leaves = tree.leaves();
  for (NodeIndex i : tree.layer(t)) {
    const auto [first, last] = tree.leaf_range(i);
    double mass = 0.0;
    double acc = 0.0;
    for (std::size_t pos = first; pos < last; ++pos) {
      const double p = tree.node(leaves[pos]).p;
      mass += p;
      acc += p * rv.values[pos];
    }
    out[i] = acc / mass;
  }
  return out;
}

AdaptedProcess conditional_expectation(const ScenarioTree& tree, const AdaptedProcess& x, int u,
                                       int s) {
  require_coverage(tree, x, u, u, "process");
  if (s < 0 || s > u) throw StructuralError("conditioning time must satisfy 0 <= s <= u");
  AdaptedProcess out(tree, s, s);
  // descendants of each time-s node at layer u
  std::vector<NodeIndex> ancestor(tree.size(), kRoot);
  for (NodeIndex i : tree.layer(s)) ancestor[static_cast<std::size_t>(i)] = i;
  for (int t = s + 1; t <= u; ++t) {
    for (NodeIndex i : tree.layer(t)) {
      ancestor[static_cast<std::size_t>(i)] = ancestor[static_cast<std::size_t>(tree.node(i).parent)];
    }
  }
  std::vector<double> mass(tree.size(), 0.0);
  std::vector<double> acc(tree.size(), 0.0);
  for (NodeIndex i : tree.layer(u)) {
    const auto a = static_cast<std::size_t>(ancestor[static_cast<std::size_t>(i)]);
    mass[a] += tree.node(i).p;
    acc[a] += tree.node(i).p * x[i];
  }
  for (NodeIndex i : tree.layer(s)) {
    out[i] = acc[static_cast<std::size_t>(i)] / mass[static_cast<std::size_t>(i)];
  }
  return out;
}

MartingaleCheck is_martingale(const ScenarioTree& tree, const AdaptedProcess& process, double tol) {
  require_coverage(tree, process, 0, tree.horizon(), "process");
  MartingaleCheck check;
  for (int t = 0; t < tree.horizon(); ++t) {
    for (NodeIndex i : tree.layer(t)) {
      const auto& n = tree.node(i);
      double drift = 0.0;
      for (NodeIndex c : n.children) drift += tree.node(c).p * (process[c] - process[i]);
      drift /= n.p;
      if (std::abs(drift) > check.max_violation) {
        check.max_violation = std::abs(drift);
        check.worst_node = i;
      }
    }
  }
  check.is_martingale = check.max_violation <= tol;
  return check;
}

}  // namespace shadowprice
