#include "satsched/mcts.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace satsched {

std::string_view to_string(Variant v) { return v == Variant::kAverage ? "average" : "max"; }

Variant parse_variant(std::string_view name) {
  if (name == "average" || name == "avg") return Variant::kAverage;
  if (name == "max") return Variant::kMax;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

void SearchConfig::validate() const {
  if (!(exploration > 0.0)) throw std::invalid_argument("exploration coefficient must be > 0");
  if (num_simulations < 1) throw std::invalid_argument("num_simulations must be >= 1");
  if (time_limit_s && !(*time_limit_s > 0.0)) {
    throw std::invalid_argument("time limit must be > 0");
  }
}

namespace {

inline double exploit_term(Variant variant, double value, std::uint64_t visits) {
  return variant == Variant::kAverage ? value / static_cast<double>(visits) : value;
}

}  // namespace

double uct_score(Variant variant, double value, std::uint64_t visits,
                 std::uint64_t parent_visits, double c) {
  if (visits == 0) return std::numeric_limits<double>::infinity();
  return exploit_term(variant, value, visits) +
         c * std::sqrt(std::log(static_cast<double>(parent_visits)) /
                       static_cast<double>(visits));
}

SearchTree::SearchTree(const ProblemInstance& inst, const ScheduleGraph& graph,
                       const SearchConfig& config)
    : inst_(&inst), graph_(&graph), config_(config), rng_(config.seed), scorer_(inst) {
  config_.validate();
  TreeNode root;
  root.node = NodeId::start(1);
  root.state = OrbitResourceState::fresh(1);
  nodes_.push_back(root);
}

std::size_t SearchTree::uniform_index(std::size_t n) {
  if (n <= 1) return 0;
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
}

const std::vector<SearchTree::Index>& SearchTree::select() {
  path_.clear();
  Index current = kRoot;
  path_.push_back(current);
  const double c = config_.exploration;
  const Variant variant = config_.variant;
  while (nodes_[current].expanded) {
    const TreeNode& parent = nodes_[current];
    const double log_parent = std::log(static_cast<double>(parent.visits));
    Index chosen = parent.first_child;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t ties = 0;
    const Index end = parent.first_child + parent.num_children;
    for (Index ci = parent.first_child; ci < end; ++ci) {
      const TreeNode& child = nodes_[ci];
      const double score =
          child.visits == 0
              ? std::numeric_limits<double>::infinity()
              : exploit_term(variant, child.value, child.visits) +
                    c * std::sqrt(log_parent / static_cast<double>(child.visits));
      if (score > best) {
        best = score;
        chosen = ci;
        ties = 1;
      } else if (score == best) {
        ++ties;
        if (uniform_index(ties) == 0) chosen = ci;
      }
    }
    current = chosen;
    path_.push_back(current);
  }
  return path_;
}

SearchTree::Index SearchTree::expand(Index leaf) {
  if (nodes_[leaf].expanded) throw std::logic_error("expand: node already expanded");
  if (is_terminal(leaf)) throw std::logic_error("expand: terminal node has no children");
  const NodeId at = nodes_[leaf].node;
  const OrbitResourceState state = nodes_[leaf].state;
  legal_successors_into(*graph_, *inst_, at, state, successors_);

  const auto first = static_cast<Index>(nodes_.size());
  for (const NodeId& next : successors_) {
    TreeNode child;
    child.node = next;
    child.state = *extend(state, *inst_, next);
    nodes_.push_back(child);
  }
  TreeNode& parent = nodes_[leaf];
  parent.first_child = first;
  parent.num_children = static_cast<std::uint32_t>(successors_.size());
  parent.expanded = true;
  return first + static_cast<Index>(uniform_index(successors_.size()));
}

double SearchTree::simulate(std::span<const Index> path) {
  scorer_.reset();
  rollout_.clear();
  for (Index i : path) {
    const NodeId& n = nodes_[i].node;
    rollout_.push_back(n);
    if (n.is_task()) scorer_.place(n.task, n.orbit);
  }
  NodeId current = nodes_[path.back()].node;
  OrbitResourceState state = nodes_[path.back()].state;
  while (!graph_->is_terminal(current)) {
    legal_successors_into(*graph_, *inst_, current, state, successors_);
    const NodeId next = successors_[uniform_index(successors_.size())];
    state = *extend(state, *inst_, next);
    if (next.is_task()) scorer_.place(next.task, next.orbit);
    rollout_.push_back(next);
    current = next;
  }
  const double value = scorer_.value();
  if (value > best_value_) {
    best_value_ = value;
    best_path_ = rollout_;
  }
  return value;
}

void SearchTree::backpropagate(std::span<const Index> path, double value) {
  for (Index i : path) {
    TreeNode& n = nodes_[i];
    ++n.visits;
    if (config_.variant == Variant::kAverage) {
      n.value += value;
    } else if (value > n.value) {
      n.value = value;
    }
  }
  ++nodes_[path.back()].playouts;
}

void SearchTree::run_iteration() {
  select();
  const Index leaf = path_.back();
  if (!is_terminal(leaf)) path_.push_back(expand(leaf));
  const double value = simulate(path_);
  backpropagate(path_, value);
}

void SearchTree::complete_randomly(NodeId current, OrbitResourceState state, Schedule& sched) {
  while (!graph_->is_terminal(current)) {
    legal_successors_into(*graph_, *inst_, current, state, successors_);
    const NodeId next = successors_[uniform_index(successors_.size())];
    state = *extend(state, *inst_, next);
    if (next.is_task()) sched.orbit(next.orbit).push_back(next.task);
    current = next;
  }
}

Schedule SearchTree::extract_path() {
  Schedule sched(inst_->num_orbits());
  completed_by_rollout_ = false;
  std::vector<NodeId> prefix{nodes_[kRoot].node};
  Index current = kRoot;
  while (!is_terminal(current)) {
    const TreeNode& parent = nodes_[current];
    if (!parent.expanded) {
      completed_by_rollout_ = true;
      const bool on_best = best_path_.size() > prefix.size() &&
                           std::equal(prefix.begin(), prefix.end(), best_path_.begin());
      if (on_best) {
        for (std::size_t p = prefix.size(); p < best_path_.size(); ++p) {
          if (best_path_[p].is_task()) sched.orbit(best_path_[p].orbit).push_back(best_path_[p].task);
        }
      } else {
        complete_randomly(parent.node, parent.state, sched);
      }
      return sched;
    }

    Index chosen = parent.first_child;
    bool have = false;
    const Index end = parent.first_child + parent.num_children;
    for (Index ci = parent.first_child; ci < end; ++ci) {
      const TreeNode& child = nodes_[ci];
      if (config_.variant == Variant::kMax && child.visits == 0) continue;
      if (!have) {
        chosen = ci;
        have = true;
        continue;
      }
      const TreeNode& best = nodes_[chosen];
      const bool better =
          config_.variant == Variant::kAverage
              ? (child.visits > best.visits ||
                 (child.visits == best.visits && child.node < best.node))
              : (child.value > best.value || (child.value == best.value && child.node < best.node));
      if (better) chosen = ci;
    }
    current = chosen;
    const NodeId& n = nodes_[current].node;
    prefix.push_back(n);
    if (n.is_task()) sched.orbit(n.orbit).push_back(n.task);
  }
  return sched;
}

SearchResult search(const ProblemInstance& inst, const ScheduleGraph& graph,
                    const SearchConfig& config) {
  using Clock = std::chrono::steady_clock;
  SearchTree tree(inst, graph, config);
  const auto start = Clock::now();
  std::uint64_t done = 0;
  for (; done < config.num_simulations; ++done) {
    if (config.time_limit_s && done > 0 && done % 64 == 0 &&
        std::chrono::duration<double>(Clock::now() - start).count() >= *config.time_limit_s) {
      break;
    }
    tree.run_iteration();
  }
  SearchResult result;
  result.schedule = tree.extract_path();
  result.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
  result.expected_value = expected_value(inst, result.schedule);
  result.simulations_run = done;
  result.best_rollout_value = tree.best_rollout_value();
  result.completed_by_rollout = tree.completed_by_rollout();
  result.tree_size = tree.size();
  return result;
}

}  // namespace satsched
