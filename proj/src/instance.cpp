#include "satsched/instance.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "satsched/json_io.hpp"

namespace satsched {

using nlohmann::json;

namespace {

std::string ctx_task_orbit(TaskId i, int k) {
  return "task " + std::to_string(i) + ", orbit " + std::to_string(k);
}

[[noreturn]] void schema_error(const std::string& what) {
  throw InstanceError(InstanceError::Kind::kSchema, "schema error: " + what);
}

[[noreturn]] void invariant_error(const std::string& what) {
  throw InstanceError(InstanceError::Kind::kInvariant, "invariant violation: " + what);
}

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where + ": missing key '" + key + "'");
  return *it;
}

double require_number(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number()) schema_error(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t require_integer(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) schema_error(where + ": '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

bool require_bool(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_boolean()) schema_error(where + ": '" + key + "' must be a boolean");
  return v.get<bool>();
}

const json& require_array(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_array()) schema_error(where + ": '" + key + "' must be an array");
  return v;
}

void check_nonneg(double v, const std::string& where, const char* field) {
  if (!(v >= 0.0)) invariant_error(where + ": field '" + std::string(field) + "' must be >= 0");
}

void check_range(const std::pair<double, double>& r, const char* name, double lo, double hi) {
  if (!(r.first <= r.second) || !(r.first >= lo) || !(r.second <= hi)) {
    throw InstanceError(InstanceError::Kind::kParameter,
                        std::string("invalid ") + name + " [" + std::to_string(r.first) + ", " +
                            std::to_string(r.second) + "]");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InstanceError(InstanceError::Kind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InstanceError(InstanceError::Kind::kIo, "cannot write " + path.string());
  out << text;
  if (!out) throw InstanceError(InstanceError::Kind::kIo, "write failed for " + path.string());
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

ProblemInstance::ProblemInstance(int num_orbits, std::vector<TaskDef> tasks)
    : tasks_(std::move(tasks)) {
  if (num_orbits < 1) invariant_error("num_orbits must be >= 1");
  orbits_.resize(static_cast<std::size_t>(num_orbits));
  for (int k = 1; k <= num_orbits; ++k) orbits_[static_cast<std::size_t>(k - 1)].index = k;
  const auto n = tasks_.size();
  opportunities_.assign(n * orbits_.size(), Opportunity{});
  transitions_.assign(orbits_.size() * n * n, Transition{});
}

std::vector<TaskId> ProblemInstance::available_tasks(int k) const {
  std::vector<TaskId> out;
  for (TaskId i = 0; i < num_tasks(); ++i) {
    if (available(i, k)) out.push_back(i);
  }
  return out;
}

void ProblemInstance::validate() const {
  if (orbits_.empty()) invariant_error("num_orbits must be >= 1");
  for (TaskId i = 0; i < num_tasks(); ++i) {
    if (tasks_[static_cast<std::size_t>(i)].id != i) {
      invariant_error("task ids must be 0..n-1 in order (position " + std::to_string(i) + ")");
    }
    check_nonneg(tasks_[static_cast<std::size_t>(i)].profit, "task " + std::to_string(i), "profit");
  }
  for (int k = 1; k <= num_orbits(); ++k) {
    const OrbitSpec& o = orbit(k);
    const std::string where = "orbit " + std::to_string(k);
    if (o.index != k) invariant_error(where + ": index mismatch");
    check_nonneg(o.memory_capacity, where, "memory_capacity");
    check_nonneg(o.energy_capacity, where, "energy_capacity");
    check_nonneg(o.memory_rate, where, "memory_rate");
    check_nonneg(o.energy_rate, where, "energy_rate");
  }
  for (TaskId i = 0; i < num_tasks(); ++i) {
    for (int k = 1; k <= num_orbits(); ++k) {
      const Opportunity& op = opportunity(i, k);
      if (!op.available) continue;
      const std::string where = ctx_task_orbit(i, k);
      if (!(op.window_start <= op.window_end)) {
        invariant_error(where + ": field 'window_start' must be <= 'window_end'");
      }
      if (!(op.success_probability >= 0.0 && op.success_probability <= 1.0)) {
        invariant_error(where + ": field 'probability' must lie in [0, 1]");
      }
    }
  }
  for (int k = 1; k <= num_orbits(); ++k) {
    for (TaskId i = 0; i < num_tasks(); ++i) {
      for (TaskId j = 0; j < num_tasks(); ++j) {
        if (i == j || !available(i, k) || !available(j, k)) continue;
        const Transition& t = transition(i, j, k);
        const std::string where = "transition " + std::to_string(i) + "->" + std::to_string(j) +
                                  ", orbit " + std::to_string(k);
        check_nonneg(t.setup_time, where, "setup_time");
        check_nonneg(t.slew_energy, where, "slew_energy");
      }
    }
  }
}

std::size_t Schedule::num_placements() const {
  std::size_t total = 0;
  for (const auto& o : per_orbit) total += o.size();
  return total;
}

void GeneratorParams::validate() const {
  using K = InstanceError::Kind;
  if (num_orbits < 1) throw InstanceError(K::kParameter, "num_orbits must be >= 1");
  if (num_tasks < 0) throw InstanceError(K::kParameter, "num_tasks must be >= 0");
  if (!(visibility_rate >= 0.0 && visibility_rate <= 1.0)) {
    throw InstanceError(K::kParameter, "visibility_rate must lie in [0, 1]");
  }
  if (!(capacity_tightness > 0.0 && capacity_tightness <= 1.0)) {
    throw InstanceError(K::kParameter, "capacity_tightness must lie in (0, 1]");
  }
  const double inf = std::numeric_limits<double>::infinity();
  check_range(window_duration_range, "window_duration_range", 0.0, inf);
  check_range(profit_range, "profit_range", 0.0, inf);
  check_range(probability_range, "probability_range", 0.0, 1.0);
  check_range(setup_time_range, "setup_time_range", 0.0, inf);
  check_range(slew_energy_range, "slew_energy_range", 0.0, inf);
  if (!(orbit_horizon >= window_duration_range.second)) {
    throw InstanceError(K::kParameter, "orbit_horizon must be >= the longest window duration");
  }
}

ProblemInstance generate(const GeneratorParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  auto uniform_range = [&uniform](const std::pair<double, double>& r) {
    return r.first == r.second ? r.first : uniform(r.first, r.second);
  };

  std::vector<TaskDef> tasks(static_cast<std::size_t>(params.num_tasks));
  for (TaskId i = 0; i < params.num_tasks; ++i) {
    tasks[static_cast<std::size_t>(i)] = {i, uniform_range(params.profit_range)};
  }
  ProblemInstance inst(params.num_orbits, std::move(tasks));

  for (int k = 1; k <= params.num_orbits; ++k) {
    OrbitSpec& orbit = inst.orbit(k);
    orbit.memory_rate = 1.0;
    orbit.energy_rate = 1.0;

    std::vector<TaskId> visible;
    for (TaskId i = 0; i < params.num_tasks; ++i) {
      if (!(uniform(0.0, 1.0) < params.visibility_rate)) continue;
      const double duration = uniform_range(params.window_duration_range);
      const double start = uniform(0.0, params.orbit_horizon - duration);
      Opportunity& op = inst.opportunity(i, k);
      op.available = true;
      op.window_start = start;
      op.window_end = start + duration;
      op.success_probability = uniform_range(params.probability_range);
      visible.push_back(i);
    }

    double slew_total = 0.0;
    std::size_t slew_count = 0;
    for (TaskId i : visible) {
      for (TaskId j : visible) {
        if (i == j) continue;
        Transition& t = inst.transition(i, j, k);
        t.setup_time = uniform_range(params.setup_time_range);
        t.slew_energy = uniform_range(params.slew_energy_range);
        slew_total += t.slew_energy;
        ++slew_count;
      }
    }

    // Summed in window order, the order a schedule of every visible task
    // would accumulate them, so tightness 1 leaves that schedule exactly feasible.
    std::vector<TaskId> by_start = visible;
    std::stable_sort(by_start.begin(), by_start.end(), [&](TaskId a, TaskId b) {
      return inst.opportunity(a, k).window_start < inst.opportunity(b, k).window_start;
    });
    double memory_demand = 0.0;
    double energy_demand = 0.0;
    for (TaskId i : by_start) {
      const double d = inst.opportunity(i, k).duration();
      memory_demand += d * orbit.memory_rate;
      energy_demand += d * orbit.energy_rate;
    }
    if (slew_count > 0) {
      const double mean_slew = slew_total / static_cast<double>(slew_count);
      energy_demand += static_cast<double>(visible.size() - 1) * mean_slew;
    }
    orbit.memory_capacity = params.capacity_tightness * memory_demand;
    orbit.energy_capacity = params.capacity_tightness * energy_demand;
  }
  return inst;
}

std::string serialize_instance(const ProblemInstance& inst) {
  json root;
  root["num_orbits"] = inst.num_orbits();

  json tasks = json::array();
  for (const TaskDef& t : inst.tasks()) tasks.push_back({{"id", t.id}, {"profit", t.profit}});
  root["tasks"] = std::move(tasks);

  json orbits = json::array();
  for (const OrbitSpec& o : inst.orbits()) {
    orbits.push_back({{"index", o.index},
                      {"memory_capacity", o.memory_capacity},
                      {"energy_capacity", o.energy_capacity},
                      {"memory_rate", o.memory_rate},
                      {"energy_rate", o.energy_rate}});
  }
  root["orbits"] = std::move(orbits);

  json opps = json::array();
  for (TaskId i = 0; i < inst.num_tasks(); ++i) {
    for (int k = 1; k <= inst.num_orbits(); ++k) {
      const Opportunity& op = inst.opportunity(i, k);
      opps.push_back({{"task", i},
                      {"orbit", k},
                      {"available", op.available},
                      {"window_start", op.window_start},
                      {"window_end", op.window_end},
                      {"probability", op.success_probability}});
    }
  }
  root["opportunities"] = std::move(opps);

  json trans = json::array();
  for (int k = 1; k <= inst.num_orbits(); ++k) {
    for (TaskId i = 0; i < inst.num_tasks(); ++i) {
      if (!inst.available(i, k)) continue;
      for (TaskId j = 0; j < inst.num_tasks(); ++j) {
        if (i == j || !inst.available(j, k)) continue;
        const Transition& t = inst.transition(i, j, k);
        trans.push_back({{"orbit", k},
                         {"from", i},
                         {"to", j},
                         {"setup_time", t.setup_time},
                         {"slew_energy", t.slew_energy}});
      }
    }
  }
  root["transitions"] = std::move(trans);
  return root.dump(1) + "\n";
}

ProblemInstance parse_instance(const std::string& text) {
  const json root = parse_json(text);
  if (!root.is_object()) schema_error("top level must be an object");

  const std::int64_t num_orbits = require_integer(root, "num_orbits", "instance");
  if (num_orbits < 1) invariant_error("instance: field 'num_orbits' must be >= 1");
  const int m = static_cast<int>(num_orbits);

  const json& tasks_json = require_array(root, "tasks", "instance");
  const auto n = static_cast<TaskId>(tasks_json.size());
  std::vector<TaskDef> tasks(tasks_json.size());
  std::vector<bool> seen_task(tasks_json.size(), false);
  for (const json& t : tasks_json) {
    if (!t.is_object()) schema_error("tasks: entries must be objects");
    const std::int64_t id = require_integer(t, "id", "tasks");
    if (id < 0 || id >= n) {
      schema_error("tasks: id " + std::to_string(id) + " outside 0.." + std::to_string(n - 1));
    }
    if (seen_task[static_cast<std::size_t>(id)]) {
      schema_error("tasks: duplicate id " + std::to_string(id));
    }
    seen_task[static_cast<std::size_t>(id)] = true;
    const double profit = require_number(t, "profit", "task " + std::to_string(id));
    check_nonneg(profit, "task " + std::to_string(id), "profit");
    tasks[static_cast<std::size_t>(id)] = {static_cast<TaskId>(id), profit};
  }

  ProblemInstance inst(m, std::move(tasks));

  const json& orbits_json = require_array(root, "orbits", "instance");
  if (orbits_json.size() != static_cast<std::size_t>(m)) {
    schema_error("orbits: expected " + std::to_string(m) + " entries, found " +
                 std::to_string(orbits_json.size()));
  }
  std::vector<bool> seen_orbit(static_cast<std::size_t>(m), false);
  for (const json& o : orbits_json) {
    if (!o.is_object()) schema_error("orbits: entries must be objects");
    const std::int64_t k = require_integer(o, "index", "orbits");
    if (k < 1 || k > m) schema_error("orbits: index " + std::to_string(k) + " out of range");
    if (seen_orbit[static_cast<std::size_t>(k - 1)]) {
      schema_error("orbits: duplicate index " + std::to_string(k));
    }
    seen_orbit[static_cast<std::size_t>(k - 1)] = true;
    const std::string where = "orbit " + std::to_string(k);
    OrbitSpec& spec = inst.orbit(static_cast<int>(k));
    spec.memory_capacity = require_number(o, "memory_capacity", where);
    spec.energy_capacity = require_number(o, "energy_capacity", where);
    spec.memory_rate = require_number(o, "memory_rate", where);
    spec.energy_rate = require_number(o, "energy_rate", where);
    check_nonneg(spec.memory_capacity, where, "memory_capacity");
    check_nonneg(spec.energy_capacity, where, "energy_capacity");
    check_nonneg(spec.memory_rate, where, "memory_rate");
    check_nonneg(spec.energy_rate, where, "energy_rate");
  }

  const json& opps_json = require_array(root, "opportunities", "instance");
  std::vector<bool> seen_opp(static_cast<std::size_t>(n) * static_cast<std::size_t>(m), false);
  for (const json& o : opps_json) {
    if (!o.is_object()) schema_error("opportunities: entries must be objects");
    const std::int64_t i = require_integer(o, "task", "opportunities");
    const std::int64_t k = require_integer(o, "orbit", "opportunities");
    if (i < 0 || i >= n || k < 1 || k > m) {
      schema_error("opportunities: (task " + std::to_string(i) + ", orbit " + std::to_string(k) +
                   ") out of range");
    }
    const auto slot = static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
                      static_cast<std::size_t>(k - 1);
    const std::string where = ctx_task_orbit(static_cast<TaskId>(i), static_cast<int>(k));
    if (seen_opp[slot]) schema_error("opportunities: duplicate entry for " + where);
    seen_opp[slot] = true;
    if (!require_bool(o, "available", where)) continue;

    Opportunity& op = inst.opportunity(static_cast<TaskId>(i), static_cast<int>(k));
    op.available = true;
    op.window_start = require_number(o, "window_start", where);
    op.window_end = require_number(o, "window_end", where);
    op.success_probability = require_number(o, "probability", where);
    if (!(op.window_start <= op.window_end)) {
      invariant_error(where + ": field 'window_start' must be <= 'window_end'");
    }
    if (!(op.success_probability >= 0.0 && op.success_probability <= 1.0)) {
      invariant_error(where + ": field 'probability' must lie in [0, 1]");
    }
  }
  for (TaskId i = 0; i < n; ++i) {
    for (int k = 1; k <= m; ++k) {
      const auto slot = static_cast<std::size_t>(i) * static_cast<std::size_t>(m) +
                        static_cast<std::size_t>(k - 1);
      if (!seen_opp[slot]) schema_error("opportunities: missing entry for " + ctx_task_orbit(i, k));
    }
  }

  const json& trans_json = require_array(root, "transitions", "instance");
  std::vector<bool> seen_trans(static_cast<std::size_t>(m) * static_cast<std::size_t>(n) *
                                   static_cast<std::size_t>(n),
                               false);
  for (const json& t : trans_json) {
    if (!t.is_object()) schema_error("transitions: entries must be objects");
    const std::int64_t k = require_integer(t, "orbit", "transitions");
    const std::int64_t i = require_integer(t, "from", "transitions");
    const std::int64_t j = require_integer(t, "to", "transitions");
    const std::string where = "transition " + std::to_string(i) + "->" + std::to_string(j) +
                              ", orbit " + std::to_string(k);
    if (k < 1 || k > m || i < 0 || i >= n || j < 0 || j >= n || i == j) {
      schema_error(where + " out of range");
    }
    const auto ti = static_cast<TaskId>(i);
    const auto tj = static_cast<TaskId>(j);
    const auto ko = static_cast<int>(k);
    const double setup = require_number(t, "setup_time", where);
    const double slew = require_number(t, "slew_energy", where);
    if (!inst.available(ti, ko) || !inst.available(tj, ko)) continue;
    const auto slot = (static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(n) +
                       static_cast<std::size_t>(i)) *
                          static_cast<std::size_t>(n) +
                      static_cast<std::size_t>(j);
    if (seen_trans[slot]) schema_error("transitions: duplicate entry for " + where);
    seen_trans[slot] = true;
    check_nonneg(setup, where, "setup_time");
    check_nonneg(slew, where, "slew_energy");
    inst.transition(ti, tj, ko) = {setup, slew};
  }
  for (int k = 1; k <= m; ++k) {
    for (TaskId i = 0; i < n; ++i) {
      if (!inst.available(i, k)) continue;
      for (TaskId j = 0; j < n; ++j) {
        if (i == j || !inst.available(j, k)) continue;
        const auto slot = (static_cast<std::size_t>(k - 1) * static_cast<std::size_t>(n) +
                           static_cast<std::size_t>(i)) *
                              static_cast<std::size_t>(n) +
                          static_cast<std::size_t>(j);
        if (!seen_trans[slot]) {
          schema_error("transitions: missing entry for transition " + std::to_string(i) + "->" +
                       std::to_string(j) + ", orbit " + std::to_string(k));
        }
      }
    }
  }
  return inst;
}

ProblemInstance load_instance(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw InstanceError(InstanceError::Kind::kIo, "instance file not found: " + path.string());
  }
  try {
    return parse_instance(read_file(path));
  } catch (const InstanceError& e) {
    throw InstanceError(e.kind(), path.string() + ": " + e.what());
  }
}

void save_instance(const ProblemInstance& inst, const std::filesystem::path& path) {
  write_file(path, serialize_instance(inst));
}

std::string serialize_schedule(const ScheduleFile& file) {
  json root;
  root["instance_id"] = file.instance_id;
  root["per_orbit"] = file.schedule.per_orbit;
  root["expected_value"] = file.expected_value;
  return root.dump(1) + "\n";
}

ScheduleFile parse_schedule(const std::string& text) {
  const json root = parse_json(text);
  if (!root.is_object()) schema_error("schedule: top level must be an object");
  ScheduleFile out;
  const json& id = require(root, "instance_id", "schedule");
  if (!id.is_string()) schema_error("schedule: 'instance_id' must be a string");
  out.instance_id = id.get<std::string>();
  const json& per_orbit = require_array(root, "per_orbit", "schedule");
  for (const json& orbit : per_orbit) {
    if (!orbit.is_array()) schema_error("schedule: 'per_orbit' entries must be arrays");
    std::vector<TaskId> tasks;
    for (const json& t : orbit) {
      if (!t.is_number_integer()) schema_error("schedule: task ids must be integers");
      tasks.push_back(t.get<TaskId>());
    }
    out.schedule.per_orbit.push_back(std::move(tasks));
  }
  out.expected_value = require_number(root, "expected_value", "schedule");
  return out;
}

void save_schedule(const ScheduleFile& file, const std::filesystem::path& path) {
  write_file(path, serialize_schedule(file));
}

ScheduleFile load_schedule(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw InstanceError(InstanceError::Kind::kIo, "schedule file not found: " + path.string());
  }
  return parse_schedule(read_file(path));
}

// GeneratorParams <-> JSON

void to_json(json& j, const GeneratorParams& p) {
  auto range = [](const std::pair<double, double>& r) { return json::array({r.first, r.second}); };
  j = json{{"num_orbits", p.num_orbits},
           {"num_tasks", p.num_tasks},
           {"seed", p.seed},
           {"orbit_horizon", p.orbit_horizon},
           {"visibility_rate", p.visibility_rate},
           {"window_duration_range", range(p.window_duration_range)},
           {"profit_range", range(p.profit_range)},
           {"probability_range", range(p.probability_range)},
           {"setup_time_range", range(p.setup_time_range)},
           {"slew_energy_range", range(p.slew_energy_range)},
           {"capacity_tightness", p.capacity_tightness}};
}

void from_json(const json& j, GeneratorParams& p) {
  using K = InstanceError::Kind;
  if (!j.is_object()) throw InstanceError(K::kParameter, "generator params must be an object");
  auto range = [](const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw InstanceError(K::kParameter, key + " must be a [min, max] pair");
    }
    return std::pair<double, double>{v[0].get<double>(), v[1].get<double>()};
  };
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "num_orbits") p.num_orbits = v.get<int>();
      else if (key == "num_tasks") p.num_tasks = v.get<int>();
      else if (key == "seed") p.seed = v.get<std::uint64_t>();
      else if (key == "orbit_horizon") p.orbit_horizon = v.get<double>();
      else if (key == "visibility_rate") p.visibility_rate = v.get<double>();
      else if (key == "window_duration_range") p.window_duration_range = range(v, key);
      else if (key == "profit_range") p.profit_range = range(v, key);
      else if (key == "probability_range") p.probability_range = range(v, key);
      else if (key == "setup_time_range") p.setup_time_range = range(v, key);
      else if (key == "slew_energy_range") p.slew_energy_range = range(v, key);
      else if (key == "capacity_tightness") p.capacity_tightness = v.get<double>();
      else throw InstanceError(K::kParameter, "unknown generator parameter '" + key + "'");
    } catch (const json::exception& e) {
      throw InstanceError(K::kParameter, "generator parameter '" + key + "': " + e.what());
    }
  }
}

}  // namespace satsched
