#include "satsched/scoring.hpp"

#include <stdexcept>
#include <string>

namespace satsched {

double PlacementScorer::value() const {
  // Summed in ascending task order; untouched tasks contribute an exact 0.
  double total = 0.0;
  const auto n = miss_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (miss_[i] != 1.0) total += inst_->tasks()[i].profit * (1.0 - miss_[i]);
  }
  return total;
}

double expected_value(const ProblemInstance& inst, const Schedule& sched) {
  if (sched.per_orbit.size() != static_cast<std::size_t>(inst.num_orbits())) {
    throw std::out_of_range("schedule has " + std::to_string(sched.per_orbit.size()) +
                            " orbits, instance has " + std::to_string(inst.num_orbits()));
  }
  PlacementScorer scorer(inst);
  for (int k = 1; k <= inst.num_orbits(); ++k) {
    for (TaskId i : sched.orbit(k)) {
      if (i < 0 || i >= inst.num_tasks()) {
        throw std::out_of_range("unknown task id " + std::to_string(i));
      }
      scorer.place(i, k);
    }
  }
  return scorer.value();
}

}  // namespace satsched
