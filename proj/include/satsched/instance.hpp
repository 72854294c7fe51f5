#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace satsched {

using TaskId = std::int32_t;
inline constexpr TaskId kNoTask = -1;

/// A task that may be observed in any orbit where it is visible.
struct TaskDef {
  TaskId id = 0;
  double profit = 0.0;

  bool operator==(const TaskDef&) const = default;
};

/// Per-orbit resource budget. `index` is 1-based.
struct OrbitSpec {
  int index = 1;
  double memory_capacity = 0.0;
  double energy_capacity = 0.0;
  double memory_rate = 1.0;
  double energy_rate = 1.0;

  bool operator==(const OrbitSpec&) const = default;
};

/// Visibility of one task in one orbit. When `available` is false the
/// remaining fields carry no meaning and are held at zero.
struct Opportunity {
  bool available = false;
  double window_start = 0.0;
  double window_end = 0.0;
  double success_probability = 0.0;

  double duration() const { return window_end - window_start; }

  bool operator==(const Opportunity&) const = default;
};

struct Transition {
  double setup_time = 0.0;
  double slew_energy = 0.0;

  bool operator==(const Transition&) const = default;
};

/**
 * @brief A complete multi-orbit collection scheduling problem.
 *
 * Task ids are dense: `tasks[i].id == i`. Orbits are addressed 1..M in the
 * public API. Opportunity and transition tables are dense; transitions are
 * only meaningful for ordered pairs of distinct tasks that are both visible
 * in the orbit, every other entry is zero.
 *
 * Immutable once built; safe to share between concurrent searches.
 */
class ProblemInstance {
 public:
  ProblemInstance() = default;

  /// Builds an instance with every opportunity unavailable and zero
  /// transitions. Orbit specs get indices 1..num_orbits.
  ProblemInstance(int num_orbits, std::vector<TaskDef> tasks);

  int num_orbits() const { return static_cast<int>(orbits_.size()); }
  int num_tasks() const { return static_cast<int>(tasks_.size()); }

  const std::vector<TaskDef>& tasks() const { return tasks_; }
  const std::vector<OrbitSpec>& orbits() const { return orbits_; }

  const TaskDef& task(TaskId i) const { return tasks_[static_cast<std::size_t>(i)]; }
  const OrbitSpec& orbit(int k) const { return orbits_[static_cast<std::size_t>(k - 1)]; }
  OrbitSpec& orbit(int k) { return orbits_[static_cast<std::size_t>(k - 1)]; }

  const Opportunity& opportunity(TaskId i, int k) const {
    return opportunities_[opp_index(i, k)];
  }
  Opportunity& opportunity(TaskId i, int k) { return opportunities_[opp_index(i, k)]; }

  bool available(TaskId i, int k) const { return opportunity(i, k).available; }

  const Transition& transition(TaskId from, TaskId to, int k) const {
    return transitions_[trans_index(from, to, k)];
  }
  Transition& transition(TaskId from, TaskId to, int k) {
    return transitions_[trans_index(from, to, k)];
  }

  /// Tasks visible in orbit k, ascending by id.
  std::vector<TaskId> available_tasks(int k) const;

  /// Throws InstanceError(kInvariant) describing the first violated invariant.
  void validate() const;

  bool operator==(const ProblemInstance&) const = default;

 private:
  std::size_t opp_index(TaskId i, int k) const {
    return static_cast<std::size_t>(i) * orbits_.size() + static_cast<std::size_t>(k - 1);
  }
  std::size_t trans_index(TaskId from, TaskId to, int k) const {
    const auto n = tasks_.size();
    return (static_cast<std::size_t>(k - 1) * n + static_cast<std::size_t>(from)) * n +
           static_cast<std::size_t>(to);
  }

  std::vector<TaskDef> tasks_;
  std::vector<OrbitSpec> orbits_;
  std::vector<Opportunity> opportunities_;
  std::vector<Transition> transitions_;
};

/// Ordered task ids per orbit; `per_orbit[k - 1]` is orbit k.
struct Schedule {
  std::vector<std::vector<TaskId>> per_orbit;

  Schedule() = default;
  explicit Schedule(int num_orbits) : per_orbit(static_cast<std::size_t>(num_orbits)) {}

  std::vector<TaskId>& orbit(int k) { return per_orbit[static_cast<std::size_t>(k - 1)]; }
  const std::vector<TaskId>& orbit(int k) const {
    return per_orbit[static_cast<std::size_t>(k - 1)];
  }
  std::size_t num_placements() const;

  bool operator==(const Schedule&) const = default;
  auto operator<=>(const Schedule&) const = default;
};

struct GeneratorParams {
  int num_orbits = 2;
  int num_tasks = 5;
  std::uint64_t seed = 0;
  double orbit_horizon = 100.0;
  double visibility_rate = 0.6;
  std::pair<double, double> window_duration_range{5.0, 20.0};
  std::pair<double, double> profit_range{1.0, 10.0};
  std::pair<double, double> probability_range{0.2, 0.9};
  std::pair<double, double> setup_time_range{1.0, 10.0};
  std::pair<double, double> slew_energy_range{0.5, 5.0};
  double capacity_tightness = 0.6;

  /// Throws InstanceError(kParameter).
  void validate() const;

  bool operator==(const GeneratorParams&) const = default;
};

class InstanceError : public std::runtime_error {
 public:
  enum class Kind { kParameter, kIo, kSchema, kInvariant };

  InstanceError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Deterministic in `params`: equal params give bit-identical instances.
ProblemInstance generate(const GeneratorParams& params);

ProblemInstance load_instance(const std::filesystem::path& path);
void save_instance(const ProblemInstance& inst, const std::filesystem::path& path);

/// Canonical text form written by save_instance.
std::string serialize_instance(const ProblemInstance& inst);
ProblemInstance parse_instance(const std::string& text);

struct ScheduleFile {
  std::string instance_id;
  Schedule schedule;
  double expected_value = 0.0;
};

std::string serialize_schedule(const ScheduleFile& file);
ScheduleFile parse_schedule(const std::string& text);
void save_schedule(const ScheduleFile& file, const std::filesystem::path& path);
ScheduleFile load_schedule(const std::filesystem::path& path);

}  // namespace satsched
