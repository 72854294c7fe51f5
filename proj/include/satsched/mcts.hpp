#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "satsched/feasibility.hpp"
#include "satsched/graph.hpp"
#include "satsched/instance.hpp"
#include "satsched/scoring.hpp"

namespace satsched {

/// Average keeps the cumulative rollout value per node and ranks children by
/// their mean; Max keeps only the best rollout value seen through the node.
enum class Variant { kAverage, kMax };

std::string_view to_string(Variant v);
/// Accepts "average" or "max"; throws std::invalid_argument otherwise.
Variant parse_variant(std::string_view name);

struct SearchConfig {
  Variant variant = Variant::kMax;
  double exploration = 10.0;
  std::uint64_t num_simulations = 100000;
  std::uint64_t seed = 0;
  /// Optional wall-clock cap in seconds; the search stops at whichever of
  /// the budget or the time limit is reached first.
  std::optional<double> time_limit_s;

  /// Throws std::invalid_argument.
  void validate() const;
};

/**
 * @brief One position in the search tree.
 *
 * The tree is keyed by path: the same graph node reached through different
 * prefixes is a different TreeNode with its own resource state. Children are
 * stored contiguously in the owning tree starting at `first_child`.
 */
struct TreeNode {
  NodeId node;
  OrbitResourceState state;
  double value = 0.0;          ///< cumulative (average) or best (max) rollout value
  std::uint32_t visits = 0;
  std::uint32_t playouts = 0;  ///< backpropagations that ended at this node
  std::uint32_t first_child = 0;
  std::uint32_t num_children = 0;
  bool expanded = false;
};

struct SearchResult {
  Schedule schedule;
  double expected_value = 0.0;
  std::uint64_t simulations_run = 0;
  double wall_time_s = 0.0;
  double best_rollout_value = 0.0;
  /// True when final selection hit an unexpanded node before the terminal
  /// and the remainder of the schedule came from a rollout.
  bool completed_by_rollout = false;
  std::size_t tree_size = 0;
};

/// +inf for an unvisited node; otherwise mean (or best) value plus
/// c * sqrt(ln(parent_visits) / visits).
double uct_score(Variant variant, double value, std::uint64_t visits,
                 std::uint64_t parent_visits, double c);

class SearchTree {
 public:
  using Index = std::uint32_t;
  static constexpr Index kRoot = 0;

  SearchTree(const ProblemInstance& inst, const ScheduleGraph& graph, const SearchConfig& config);

  /// Root-to-leaf path following the highest UCT child at every expanded
  /// node, ties broken uniformly at random.
  const std::vector<Index>& select();

  /// Adds every legal successor of `leaf` as a child and returns the one
  /// picked uniformly at random for simulation. Throws std::logic_error if
  /// `leaf` is already expanded or terminal.
  Index expand(Index leaf);

  /// Value of the schedule formed by the tree path (root first) followed by a
  /// uniform random completion from its last node. A terminal last node
  /// yields the value of the path itself.
  double simulate(std::span<const Index> path);

  void backpropagate(std::span<const Index> path, double value);

  /// One select / expand / simulate / backpropagate cycle.
  void run_iteration();

  /// Final selection from the root down to the terminal node.
  Schedule extract_path();

  bool is_terminal(Index i) const { return graph_->is_terminal(nodes_[i].node); }

  const TreeNode& node(Index i) const { return nodes_[i]; }
  TreeNode& node(Index i) { return nodes_[i]; }
  std::span<const TreeNode> children(Index i) const {
    return {nodes_.data() + nodes_[i].first_child, nodes_[i].num_children};
  }
  std::size_t size() const { return nodes_.size(); }

  const SearchConfig& config() const { return config_; }
  std::mt19937_64& rng() { return rng_; }

  double best_rollout_value() const { return best_value_; }
  const std::vector<NodeId>& best_rollout_path() const { return best_path_; }
  bool completed_by_rollout() const { return completed_by_rollout_; }

 private:
  std::size_t uniform_index(std::size_t n);
  void complete_randomly(NodeId node, OrbitResourceState state, Schedule& sched);

  const ProblemInstance* inst_;
  const ScheduleGraph* graph_;
  SearchConfig config_;
  std::mt19937_64 rng_;
  std::vector<TreeNode> nodes_;

  PlacementScorer scorer_;
  std::vector<Index> path_;
  std::vector<NodeId> successors_;
  std::vector<NodeId> rollout_;

  double best_value_ = -1.0;
  std::vector<NodeId> best_path_;
  bool completed_by_rollout_ = false;
};

/// Runs the configured number of iterations and extracts the final schedule.
/// Deterministic in (instance, config) apart from wall_time_s, unless a time
/// limit cuts the search short.
SearchResult search(const ProblemInstance& inst, const ScheduleGraph& graph,
                    const SearchConfig& config);

}  // namespace satsched
