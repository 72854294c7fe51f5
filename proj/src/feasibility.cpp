#include "satsched/feasibility.hpp"

#include <sstream>
#include <stdexcept>

namespace satsched {

namespace {

// Adds task i's consumption to `state` without a capacity check.
OrbitResourceState accumulate(const OrbitResourceState& state, const ProblemInstance& inst,
                              TaskId i) {
  const int k = state.orbit;
  const OrbitSpec& orbit = inst.orbit(k);
  const double duration = inst.opportunity(i, k).duration();
  OrbitResourceState next = state;
  next.memory_used = state.memory_used + duration * orbit.memory_rate;
  next.energy_used = state.energy_used + duration * orbit.energy_rate;
  if (state.last_task != kNoTask) {
    next.energy_used = next.energy_used + inst.transition(state.last_task, i, k).slew_energy;
  }
  next.last_task = i;
  return next;
}

bool within_capacity(const OrbitResourceState& s, const OrbitSpec& orbit) {
  return s.memory_used <= orbit.memory_capacity && s.energy_used <= orbit.energy_capacity;
}

}  // namespace

std::optional<OrbitResourceState> extend(const OrbitResourceState& state,
                                         const ProblemInstance& inst, const NodeId& next) {
  if (next.is_boundary()) {
    return OrbitResourceState::fresh(next.kind == NodeKind::kEnd ? next.orbit + 1 : next.orbit);
  }
  OrbitResourceState out = accumulate(state, inst, next.task);
  if (!within_capacity(out, inst.orbit(state.orbit))) return std::nullopt;
  return out;
}

void legal_successors_into(const ScheduleGraph& g, const ProblemInstance& inst,
                           const NodeId& node, const OrbitResourceState& state,
                           std::vector<NodeId>& out) {
  out.clear();
  if (g.is_terminal(node)) return;
  const int k = ScheduleGraph::successor_orbit(node);
  const OrbitSpec& orbit = inst.orbit(k);
  // A boundary node opens orbit k with an empty budget regardless of `state`.
  const OrbitResourceState base = node.is_boundary() ? OrbitResourceState::fresh(k) : state;
  for (TaskId j : g.next_tasks(node)) {
    if (within_capacity(accumulate(base, inst, j), orbit)) out.push_back(NodeId::task_node(k, j));
  }
  out.push_back(NodeId::end(k));
}

std::vector<NodeId> legal_successors(const ScheduleGraph& g, const ProblemInstance& inst,
                                     const NodeId& node, const OrbitResourceState& state) {
  if (!g.contains(node)) throw std::out_of_range("node not in graph: " + to_string(node));
  std::vector<NodeId> out;
  legal_successors_into(g, inst, node, state, out);
  return out;
}

std::string to_string(Constraint c) {
  switch (c) {
    case Constraint::kAvailability:
      return "availability";
    case Constraint::kChaining:
      return "chaining";
    case Constraint::kTimeWindow:
      return "time_window";
    case Constraint::kMemory:
      return "memory";
    case Constraint::kEnergy:
      return "energy";
  }
  return "unknown";
}

std::vector<Violation> validate_schedule(const ProblemInstance& inst, const Schedule& sched) {
  if (sched.per_orbit.size() != static_cast<std::size_t>(inst.num_orbits())) {
    throw std::out_of_range("schedule has " + std::to_string(sched.per_orbit.size()) +
                            " orbits, instance has " + std::to_string(inst.num_orbits()));
  }
  for (const auto& orbit : sched.per_orbit) {
    for (TaskId i : orbit) {
      if (i < 0 || i >= inst.num_tasks()) {
        throw std::out_of_range("unknown task id " + std::to_string(i));
      }
    }
  }

  std::vector<Violation> out;
  for (int k = 1; k <= inst.num_orbits(); ++k) {
    const auto& tasks = sched.orbit(k);
    const OrbitSpec& spec = inst.orbit(k);

    std::vector<int> occurrences(static_cast<std::size_t>(inst.num_tasks()), 0);
    for (TaskId i : tasks) {
      if (!inst.available(i, k)) {
        out.push_back({Constraint::kAvailability, k, {i},
                       "task " + std::to_string(i) + " is not visible in orbit " +
                           std::to_string(k)});
      }
      if (++occurrences[static_cast<std::size_t>(i)] == 2) {
        out.push_back({Constraint::kChaining, k, {i},
                       "task " + std::to_string(i) + " appears more than once in orbit " +
                           std::to_string(k)});
      }
    }

    for (std::size_t p = 1; p < tasks.size(); ++p) {
      const TaskId i = tasks[p - 1];
      const TaskId j = tasks[p];
      if (i == j || !inst.available(i, k) || !inst.available(j, k)) continue;
      const double ready = inst.opportunity(i, k).window_end + inst.transition(i, j, k).setup_time;
      const double start = inst.opportunity(j, k).window_start;
      if (ready > start) {
        std::ostringstream msg;
        msg << "task " << i << " ends with setup at " << ready << " after task " << j
            << " starts at " << start << " in orbit " << k;
        out.push_back({Constraint::kTimeWindow, k, {i, j}, msg.str()});
      }
    }

    OrbitResourceState state = OrbitResourceState::fresh(k);
    for (TaskId i : tasks) state = accumulate(state, inst, i);
    if (state.memory_used > spec.memory_capacity) {
      std::ostringstream msg;
      msg << "memory " << state.memory_used << " exceeds capacity " << spec.memory_capacity
          << " in orbit " << k;
      out.push_back({Constraint::kMemory, k, tasks, msg.str()});
    }
    if (state.energy_used > spec.energy_capacity) {
      std::ostringstream msg;
      msg << "energy " << state.energy_used << " exceeds capacity " << spec.energy_capacity
          << " in orbit " << k;
      out.push_back({Constraint::kEnergy, k, tasks, msg.str()});
    }
  }
  return out;
}

}  // namespace satsched
