#pragma once

// Small hand-built instances shared by the unit tests.

#include <vector>

#include "satsched/instance.hpp"

namespace satsched::testing {

/// Instance with the given profits, every orbit holding the same capacities
/// and rates; all opportunities start unavailable.
inline ProblemInstance blank_instance(int num_orbits, const std::vector<double>& profits,
                                      double memory_capacity = 1e9,
                                      double energy_capacity = 1e9) {
  std::vector<TaskDef> tasks;
  for (std::size_t i = 0; i < profits.size(); ++i) {
    tasks.push_back({static_cast<TaskId>(i), profits[i]});
  }
  ProblemInstance inst(num_orbits, std::move(tasks));
  for (int k = 1; k <= num_orbits; ++k) {
    inst.orbit(k).memory_capacity = memory_capacity;
    inst.orbit(k).energy_capacity = energy_capacity;
  }
  return inst;
}

inline void open_window(ProblemInstance& inst, TaskId i, int k, double start, double end,
                        double probability) {
  inst.opportunity(i, k) = {true, start, end, probability};
}

/// Same setup time and slew energy for every ordered pair of distinct tasks
/// visible in orbit k.
inline void uniform_transitions(ProblemInstance& inst, int k, double setup, double slew) {
  for (TaskId a = 0; a < inst.num_tasks(); ++a) {
    for (TaskId b = 0; b < inst.num_tasks(); ++b) {
      if (a != b && inst.available(a, k) && inst.available(b, k)) {
        inst.transition(a, b, k) = {setup, slew};
      }
    }
  }
}

}  // namespace satsched::testing
