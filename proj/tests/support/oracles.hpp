#pragma once

// Test-only reference implementations. None of these go through the graph,
// feasibility or scoring modules; they restate the model directly.

#include <cstdint>
#include <random>
#include <vector>

#include "satsched/instance.hpp"

namespace satsched::testing {

/// Objective computed from the successor encoding: x[k][i][j] = 1 when j
/// directly follows i in orbit k, where j ranges over tasks and the end
/// marker. value = sum_i profit_i * (1 - prod_k (1 - p_i^k * sum_j x[k][i][j])).
double x_encoding_value(const ProblemInstance& inst, const Schedule& sched);

/// Direct check of one orbit list: visibility, distinctness, setup-time
/// ordering, memory and energy totals.
bool orbit_list_feasible(const ProblemInstance& inst, int k, const std::vector<TaskId>& tasks);

/// Every feasible ordered task list for orbit k (including the empty list).
std::vector<std::vector<TaskId>> feasible_orbit_lists(const ProblemInstance& inst, int k);

struct BruteForceResult {
  double value = 0.0;
  Schedule schedule;
  std::uint64_t schedules_checked = 0;
};

/// Cartesian product of per-orbit feasible lists, scored with
/// x_encoding_value. Exponential; only for a handful of tasks and orbits.
BruteForceResult brute_force_optimum(const ProblemInstance& inst);

/// Exact expectation of a uniform random completion from Start(1): at each
/// step every feasible next task and the orbit end are equally likely.
double exact_rollout_mean(const ProblemInstance& inst);

/// A uniformly random feasible schedule built orbit by orbit by picking
/// among `feasible_orbit_lists`.
Schedule random_feasible_schedule(const ProblemInstance& inst, std::mt19937_64& rng);

/// Random generator parameters spanning small to medium instances.
GeneratorParams random_params(std::mt19937_64& rng, int max_orbits, int max_tasks);

}  // namespace satsched::testing
