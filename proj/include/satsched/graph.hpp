#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "satsched/instance.hpp"

namespace satsched {

enum class NodeKind : std::uint8_t { kStart = 0, kTask = 1, kEnd = 2 };

/**
 * @brief A vertex of the multi-orbit scheduling graph.
 *
 * End(k) doubles as the start of orbit k+1, so a full schedule is the node
 * sequence Start(1), ..., End(1), ..., End(M). Start(k) for k > 1 is accepted
 * anywhere a node is expected and behaves exactly like End(k-1).
 *
 * Ordering is (orbit, kind, task); it is the "lowest NodeId" order used for
 * deterministic tie-breaking.
 */
struct NodeId {
  int orbit = 1;
  NodeKind kind = NodeKind::kStart;
  TaskId task = kNoTask;

  static constexpr NodeId start(int k) { return {k, NodeKind::kStart, kNoTask}; }
  static constexpr NodeId end(int k) { return {k, NodeKind::kEnd, kNoTask}; }
  static constexpr NodeId task_node(int k, TaskId i) { return {k, NodeKind::kTask, i}; }

  bool is_task() const { return kind == NodeKind::kTask; }
  bool is_boundary() const { return kind != NodeKind::kTask; }

  auto operator<=>(const NodeId&) const = default;
};

std::string to_string(const NodeId& node);

/**
 * @brief Per-orbit static adjacency.
 *
 * Task successor lists contain only tasks whose window can follow under the
 * setup-time ordering; the closing boundary End(k) is an implicit final
 * successor of every node in orbit k. Lists are sorted by (window_start, id).
 */
class ScheduleGraph {
 public:
  ScheduleGraph() = default;

  int num_orbits() const { return static_cast<int>(orbits_.size()); }

  /// Tasks reachable from the start of orbit k (all visible tasks).
  std::span<const TaskId> entry_tasks(int k) const { return orbit_data(k).entry; }

  /// Tasks that may directly follow task i in orbit k. Empty if i is not
  /// visible in k.
  std::span<const TaskId> task_successors(int k, TaskId i) const {
    return orbit_data(k).next[static_cast<std::size_t>(i)];
  }

  bool contains(const NodeId& node) const;

  /// The tasks that may follow `node` in its orbit; the orbit that is opened
  /// by a boundary node is used when `node` is End(k) with k < M.
  std::span<const TaskId> next_tasks(const NodeId& node) const;

  /// Orbit whose tasks follow `node`: node.orbit for Start/Task, orbit+1 for End.
  static int successor_orbit(const NodeId& node) {
    return node.kind == NodeKind::kEnd ? node.orbit + 1 : node.orbit;
  }

  bool is_terminal(const NodeId& node) const {
    return node.kind == NodeKind::kEnd && node.orbit == num_orbits();
  }

  std::size_t num_edges(int k) const;

 private:
  friend ScheduleGraph build_graph(const ProblemInstance& inst);

  struct Orbit {
    std::vector<TaskId> entry;
    std::vector<std::vector<TaskId>> next;
    std::vector<bool> visible;
  };
  const Orbit& orbit_data(int k) const { return orbits_[static_cast<std::size_t>(k - 1)]; }

  std::vector<Orbit> orbits_;
};

ScheduleGraph build_graph(const ProblemInstance& inst);

/// Full successor list, tasks first then the closing boundary. Throws
/// std::out_of_range for a node that is not part of the graph.
std::vector<NodeId> static_successors(const ScheduleGraph& g, const NodeId& node);

/// Graphviz rendering, one cluster per orbit.
std::string to_dot(const ScheduleGraph& g, const ProblemInstance& inst);

}  // namespace satsched
