#pragma once

#include <stdexcept>
#include <string>

#include "satsched/graph.hpp"
#include "satsched/instance.hpp"

namespace satsched {

struct BaselineResult {
  Schedule schedule;
  double value = 0.0;
};

/// Thrown by oracle_optimal when the path space is too large to enumerate.
class OracleRefused : public std::runtime_error {
 public:
  explicit OracleRefused(double estimated_paths);
  double estimated_paths() const { return estimated_paths_; }

 private:
  double estimated_paths_;
};

inline constexpr double kOraclePathLimit = 1e7;

/// Upper bound on the number of Start(1) -> End(M) paths, ignoring memory and
/// energy: the product over orbits of the per-orbit DAG path counts.
double estimate_path_count(const ScheduleGraph& g);

/**
 * @brief Exhaustive optimum over every resource-feasible multi-orbit path.
 *
 * Orbits are not solved independently because a task's success probability
 * compounds across every orbit it is placed in. Among equal-valued optima
 * the lexicographically smallest per-orbit task list wins.
 */
BaselineResult oracle_optimal(const ProblemInstance& inst, const ScheduleGraph& g,
                              double path_limit = kOraclePathLimit);

/// Orbit by orbit, append the legal task with the largest positive gain in
/// total expected value (ties to the lowest id), else close the orbit.
BaselineResult greedy(const ProblemInstance& inst, const ScheduleGraph& g);

}  // namespace satsched
