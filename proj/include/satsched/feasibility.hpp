#pragma once

#include <optional>
#include <string>
#include <vector>

#include "satsched/graph.hpp"
#include "satsched/instance.hpp"

namespace satsched {

/// Memory and energy consumed so far in the current orbit.
struct OrbitResourceState {
  double memory_used = 0.0;
  double energy_used = 0.0;
  int orbit = 1;
  TaskId last_task = kNoTask;

  static OrbitResourceState fresh(int k) { return {0.0, 0.0, k, kNoTask}; }

  bool operator==(const OrbitResourceState&) const = default;
};

/// Resource state after moving to `next`, or nullopt if the move would
/// exceed the orbit's memory or energy capacity. Boundary nodes reset the
/// state for the orbit they open.
std::optional<OrbitResourceState> extend(const OrbitResourceState& state,
                                         const ProblemInstance& inst, const NodeId& next);

/// Static successors of `node` that `extend` accepts. The closing boundary is
/// always included, so only the terminal node has no legal successor.
std::vector<NodeId> legal_successors(const ScheduleGraph& g, const ProblemInstance& inst,
                                     const NodeId& node, const OrbitResourceState& state);

/// Allocation-free variant: clears `out` and appends the legal task moves
/// followed by the boundary move.
void legal_successors_into(const ScheduleGraph& g, const ProblemInstance& inst,
                           const NodeId& node, const OrbitResourceState& state,
                           std::vector<NodeId>& out);

enum class Constraint {
  kAvailability,  // task not visible in the orbit
  kChaining,      // task repeated within an orbit
  kTimeWindow,    // window end plus setup time runs past the next window start
  kMemory,
  kEnergy,
};

std::string to_string(Constraint c);

struct Violation {
  Constraint constraint;
  int orbit = 0;
  std::vector<TaskId> tasks;
  std::string message;
};

/// Every violated constraint in the schedule (empty when the schedule is
/// feasible). Throws std::out_of_range for unknown task ids or a wrong
/// number of orbits.
std::vector<Violation> validate_schedule(const ProblemInstance& inst, const Schedule& sched);

}  // namespace satsched
