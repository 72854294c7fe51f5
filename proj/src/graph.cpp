#include "satsched/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace satsched {

std::string to_string(const NodeId& node) {
  switch (node.kind) {
    case NodeKind::kStart:
      return "s" + std::to_string(node.orbit);
    case NodeKind::kEnd:
      return "t" + std::to_string(node.orbit);
    case NodeKind::kTask:
      break;
  }
  return "task" + std::to_string(node.task) + "@" + std::to_string(node.orbit);
}

ScheduleGraph build_graph(const ProblemInstance& inst) {
  ScheduleGraph g;
  const int m = inst.num_orbits();
  const auto n = static_cast<std::size_t>(inst.num_tasks());
  g.orbits_.resize(static_cast<std::size_t>(m));

  for (int k = 1; k <= m; ++k) {
    auto& orbit = g.orbits_[static_cast<std::size_t>(k - 1)];
    orbit.next.assign(n, {});
    orbit.visible.assign(n, false);

    std::vector<TaskId> visible = inst.available_tasks(k);
    // (window_start, id) is a strict total order; edges only go forward in it,
    // which keeps each orbit acyclic even for zero-length windows.
    auto before = [&](TaskId a, TaskId b) {
      const double wa = inst.opportunity(a, k).window_start;
      const double wb = inst.opportunity(b, k).window_start;
      return wa < wb || (wa == wb && a < b);
    };
    std::sort(visible.begin(), visible.end(), before);
    orbit.entry = visible;

    for (TaskId i : visible) {
      orbit.visible[static_cast<std::size_t>(i)] = true;
      const double end_i = inst.opportunity(i, k).window_end;
      auto& succ = orbit.next[static_cast<std::size_t>(i)];
      for (TaskId j : visible) {
        if (i == j || !before(i, j)) continue;
        if (end_i + inst.transition(i, j, k).setup_time <= inst.opportunity(j, k).window_start) {
          succ.push_back(j);
        }
      }
    }
  }
  return g;
}

bool ScheduleGraph::contains(const NodeId& node) const {
  if (node.orbit < 1 || node.orbit > num_orbits()) return false;
  switch (node.kind) {
    case NodeKind::kStart:
    case NodeKind::kEnd:
      return node.task == kNoTask;
    case NodeKind::kTask:
      return node.task >= 0 &&
             static_cast<std::size_t>(node.task) < orbit_data(node.orbit).visible.size() &&
             orbit_data(node.orbit).visible[static_cast<std::size_t>(node.task)];
  }
  return false;
}

std::span<const TaskId> ScheduleGraph::next_tasks(const NodeId& node) const {
  switch (node.kind) {
    case NodeKind::kStart:
      return entry_tasks(node.orbit);
    case NodeKind::kEnd:
      if (node.orbit == num_orbits()) return {};
      return entry_tasks(node.orbit + 1);
    case NodeKind::kTask:
      break;
  }
  return task_successors(node.orbit, node.task);
}

std::size_t ScheduleGraph::num_edges(int k) const {
  const Orbit& o = orbit_data(k);
  // Start -> each task and Start -> End, plus task -> task and task -> End.
  std::size_t edges = o.entry.size() + 1;
  for (TaskId i : o.entry) edges += o.next[static_cast<std::size_t>(i)].size() + 1;
  return edges;
}

std::vector<NodeId> static_successors(const ScheduleGraph& g, const NodeId& node) {
  if (!g.contains(node)) throw std::out_of_range("node not in graph: " + to_string(node));
  if (g.is_terminal(node)) return {};
  const int k = ScheduleGraph::successor_orbit(node);
  std::vector<NodeId> out;
  for (TaskId j : g.next_tasks(node)) out.push_back(NodeId::task_node(k, j));
  out.push_back(NodeId::end(k));
  return out;
}

std::string to_dot(const ScheduleGraph& g, const ProblemInstance& inst) {
  std::ostringstream os;
  os << "digraph schedule {\n  rankdir=LR;\n";
  for (int k = 1; k <= g.num_orbits(); ++k) {
    const std::string start = k == 1 ? "s1" : "t" + std::to_string(k - 1);
    const std::string end = "t" + std::to_string(k);
    os << "  subgraph cluster_orbit" << k << " {\n    label=\"orbit " << k << "\";\n";
    for (TaskId i : g.entry_tasks(k)) {
      const Opportunity& op = inst.opportunity(i, k);
      os << "    o" << k << "_" << i << " [label=\"" << i << "\\n[" << op.window_start << ", "
         << op.window_end << "]\"];\n";
    }
    os << "  }\n";
    for (TaskId i : g.entry_tasks(k)) {
      os << "  " << start << " -> o" << k << "_" << i << ";\n";
      for (TaskId j : g.task_successors(k, i)) {
        os << "  o" << k << "_" << i << " -> o" << k << "_" << j << ";\n";
      }
      os << "  o" << k << "_" << i << " -> " << end << ";\n";
    }
    os << "  " << start << " -> " << end << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace satsched
