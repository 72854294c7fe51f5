#pragma once

#include <vector>

#include "satsched/instance.hpp"

namespace satsched {

/// Expected collected profit: sum over tasks of profit * (1 - prod(1 - p))
/// across every orbit the task is placed in. Throws std::out_of_range on
/// task ids or orbit counts that do not match the instance.
double expected_value(const ProblemInstance& inst, const Schedule& sched);

/**
 * Incremental form of expected_value used by rollouts. Placing the same
 * (task, orbit) pairs in the same orbit order yields a bit-identical value.
 */
class PlacementScorer {
 public:
  explicit PlacementScorer(const ProblemInstance& inst)
      : inst_(&inst), miss_(static_cast<std::size_t>(inst.num_tasks()), 1.0) {}

  void reset() {
    for (TaskId i : touched_) miss_[static_cast<std::size_t>(i)] = 1.0;
    touched_.clear();
  }

  void place(TaskId i, int k) {
    double& miss = miss_[static_cast<std::size_t>(i)];
    if (miss == 1.0) touched_.push_back(i);
    miss *= 1.0 - inst_->opportunity(i, k).success_probability;
  }

  double value() const;

 private:
  const ProblemInstance* inst_;
  std::vector<double> miss_;
  std::vector<TaskId> touched_;
};

}  // namespace satsched
