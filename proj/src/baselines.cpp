#include "satsched/baselines.hpp"

#include <sstream>

#include "satsched/feasibility.hpp"
#include "satsched/scoring.hpp"

namespace satsched {

namespace {

std::string refusal_message(double estimated) {
  std::ostringstream os;
  os << "oracle refused: estimated " << estimated << " paths exceeds the enumeration limit";
  return os.str();
}

// Depth-first enumeration with in-place miss-probability bookkeeping. Values
// are summed the same way as expected_value so optima compare exactly.
class Enumerator {
 public:
  Enumerator(const ProblemInstance& inst, const ScheduleGraph& g)
      : inst_(inst), g_(g), miss_(static_cast<std::size_t>(inst.num_tasks()), 1.0),
        current_(inst.num_orbits()) {}

  BaselineResult run() {
    visit(NodeId::start(1), OrbitResourceState::fresh(1));
    return best_;
  }

 private:
  double value() const {
    double total = 0.0;
    for (std::size_t i = 0; i < miss_.size(); ++i) {
      if (miss_[i] != 1.0) total += inst_.tasks()[i].profit * (1.0 - miss_[i]);
    }
    return total;
  }

  void visit(const NodeId& node, const OrbitResourceState& state) {
    if (g_.is_terminal(node)) {
      const double v = value();
      if (!found_ || v > best_.value || (v == best_.value && current_ < best_.schedule)) {
        best_.value = v;
        best_.schedule = current_;
        found_ = true;
      }
      return;
    }
    std::vector<NodeId> next;
    legal_successors_into(g_, inst_, node, state, next);
    for (const NodeId& n : next) {
      const OrbitResourceState s = *extend(state, inst_, n);
      if (!n.is_task()) {
        visit(n, s);
        continue;
      }
      double& miss = miss_[static_cast<std::size_t>(n.task)];
      const double saved = miss;
      miss *= 1.0 - inst_.opportunity(n.task, n.orbit).success_probability;
      current_.orbit(n.orbit).push_back(n.task);
      visit(n, s);
      current_.orbit(n.orbit).pop_back();
      miss = saved;
    }
  }

  const ProblemInstance& inst_;
  const ScheduleGraph& g_;
  std::vector<double> miss_;
  Schedule current_;
  BaselineResult best_;
  bool found_ = false;
};

}  // namespace

OracleRefused::OracleRefused(double estimated_paths)
    : std::runtime_error(refusal_message(estimated_paths)), estimated_paths_(estimated_paths) {}

double estimate_path_count(const ScheduleGraph& g) {
  double total = 1.0;
  for (int k = 1; k <= g.num_orbits(); ++k) {
    const auto entry = g.entry_tasks(k);
    // entry is in topological order, so walk it backwards.
    std::vector<double> from(entry.size(), 1.0);
    std::vector<std::size_t> position;
    std::size_t max_id = 0;
    for (TaskId i : entry) max_id = std::max(max_id, static_cast<std::size_t>(i));
    position.assign(max_id + 1, 0);
    for (std::size_t p = 0; p < entry.size(); ++p) position[static_cast<std::size_t>(entry[p])] = p;

    double orbit_paths = 1.0;
    for (std::size_t p = entry.size(); p-- > 0;) {
      for (TaskId j : g.task_successors(k, entry[p])) {
        from[p] += from[position[static_cast<std::size_t>(j)]];
      }
      orbit_paths += from[p];
    }
    total *= orbit_paths;
  }
  return total;
}

BaselineResult oracle_optimal(const ProblemInstance& inst, const ScheduleGraph& g,
                              double path_limit) {
  const double estimated = estimate_path_count(g);
  if (estimated > path_limit) throw OracleRefused(estimated);
  return Enumerator(inst, g).run();
}

BaselineResult greedy(const ProblemInstance& inst, const ScheduleGraph& g) {
  BaselineResult out{Schedule(inst.num_orbits()), 0.0};
  std::vector<NodeId> next;
  NodeId node = NodeId::start(1);
  OrbitResourceState state = OrbitResourceState::fresh(1);
  while (!g.is_terminal(node)) {
    legal_successors_into(g, inst, node, state, next);
    const double base = expected_value(inst, out.schedule);
    NodeId chosen = next.back();  // closing boundary
    double best_gain = 0.0;
    for (const NodeId& n : next) {
      if (!n.is_task()) continue;
      auto& orbit = out.schedule.orbit(n.orbit);
      orbit.push_back(n.task);
      const double gain = expected_value(inst, out.schedule) - base;
      orbit.pop_back();
      if (gain > best_gain || (gain == best_gain && gain > 0.0 && n.task < chosen.task)) {
        best_gain = gain;
        chosen = n;
      }
    }
    state = *extend(state, inst, chosen);
    if (chosen.is_task()) out.schedule.orbit(chosen.orbit).push_back(chosen.task);
    node = chosen;
  }
  out.value = expected_value(inst, out.schedule);
  return out;
}

}  // namespace satsched
