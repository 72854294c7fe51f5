#include "satsched/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "satsched/graph.hpp"
#include "satsched/json_io.hpp"

namespace satsched {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::string fmt_fixed(double v, int digits) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct PreparedInstance {
  std::string id;
  std::string set;
  std::shared_ptr<const ProblemInstance> instance;
  std::shared_ptr<const ScheduleGraph> graph;
  std::string error;
};

std::vector<PreparedInstance> prepare(const ExperimentPlan& plan) {
  std::vector<PreparedInstance> out;
  for (const InstanceSource& src : plan.instances) {
    for (int j = 0; j < src.count; ++j) {
      PreparedInstance p;
      p.set = src.set;
      p.id = instance_id(src, j);
      try {
        ProblemInstance inst = materialize(src, j);
        p.graph = std::make_shared<const ScheduleGraph>(build_graph(inst));
        p.instance = std::make_shared<const ProblemInstance>(std::move(inst));
      } catch (const std::exception& e) {
        p.error = e.what();
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace

std::string instance_id(const InstanceSource& src, int j) {
  if (src.path) return src.set + "/" + src.path->stem().string();
  return src.set + "#" + std::to_string(j);
}

ProblemInstance materialize(const InstanceSource& src, int j) {
  if (src.path) return load_instance(*src.path);
  GeneratorParams params = *src.generator;
  params.seed += static_cast<std::uint64_t>(j);
  return generate(params);
}

void ExperimentPlan::validate() const {
  if (instances.empty()) throw std::invalid_argument("plan: instances must be nonempty");
  if (variants.empty()) throw std::invalid_argument("plan: variants must be nonempty");
  if (c_values.empty()) throw std::invalid_argument("plan: c_values must be nonempty");
  if (sim_budgets.empty()) throw std::invalid_argument("plan: sim_budgets must be nonempty");
  if (repetitions < 1) throw std::invalid_argument("plan: repetitions must be >= 1");
  for (double c : c_values) {
    if (!(c > 0.0)) throw std::invalid_argument("plan: c values must be > 0");
  }
  for (std::uint64_t s : sim_budgets) {
    if (s < 1) throw std::invalid_argument("plan: simulation budgets must be >= 1");
  }
  for (const InstanceSource& src : instances) {
    if (src.path.has_value() == src.generator.has_value()) {
      throw std::invalid_argument("plan: each instance entry needs exactly one of path/generator");
    }
    if (src.count < 1) throw std::invalid_argument("plan: instance count must be >= 1");
  }
}

ExperimentPlan parse_plan(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("plan: malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw std::invalid_argument("plan: top level must be an object");
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };

  ExperimentPlan plan;
  try {
    for (const json& entry : root.at("instances")) {
      InstanceSource src;
      if (entry.is_string()) {
        src.path = resolve(entry.get<std::string>());
        src.set = src.path->stem().string();
      } else {
        if (entry.contains("path")) src.path = resolve(entry.at("path").get<std::string>());
        if (entry.contains("generator")) src.generator = entry.at("generator").get<GeneratorParams>();
        src.count = entry.value("count", 1);
        src.set = entry.value("set", src.path ? src.path->stem().string() : std::string("generated"));
      }
      plan.instances.push_back(std::move(src));
    }
    if (root.contains("variants")) {
      plan.variants.clear();
      for (const json& v : root.at("variants")) plan.variants.push_back(parse_variant(v.get<std::string>()));
    }
    if (root.contains("c_values")) plan.c_values = root.at("c_values").get<std::vector<double>>();
    if (root.contains("sim_budgets")) {
      plan.sim_budgets = root.at("sim_budgets").get<std::vector<std::uint64_t>>();
    }
    plan.repetitions = root.value("repetitions", plan.repetitions);
    plan.base_seed = root.value("base_seed", plan.base_seed);
    if (root.contains("time_limit_s")) plan.time_limit_s = root.at("time_limit_s").get<double>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("plan: ") + e.what());
  } catch (const InstanceError& e) {
    throw std::invalid_argument(std::string("plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open plan " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_plan(ss.str(), path.parent_path());
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t instance, Variant variant,
                          std::size_t c_index, std::size_t sims_index, int rep) {
  std::uint64_t h = splitmix64(base_seed);
  for (std::uint64_t part : {static_cast<std::uint64_t>(instance),
                             static_cast<std::uint64_t>(variant == Variant::kMax ? 1 : 0),
                             static_cast<std::uint64_t>(c_index),
                             static_cast<std::uint64_t>(sims_index),
                             static_cast<std::uint64_t>(rep)}) {
    h = splitmix64(h ^ splitmix64(part));
  }
  return h;
}

ExperimentReport run_experiment(const ExperimentPlan& plan, unsigned workers) {
  plan.validate();
  const std::vector<PreparedInstance> instances = prepare(plan);

  ExperimentReport report;
  for (const PreparedInstance& p : instances) {
    if (std::find(report.set_order.begin(), report.set_order.end(), p.set) ==
        report.set_order.end()) {
      report.set_order.push_back(p.set);
    }
  }

  struct Cell {
    std::size_t instance;
    std::size_t c_index;
    std::size_t sims_index;
  };
  std::vector<Cell> cells;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (Variant v : plan.variants) {
      for (std::size_t ci = 0; ci < plan.c_values.size(); ++ci) {
        for (std::size_t si = 0; si < plan.sim_budgets.size(); ++si) {
          for (int rep = 0; rep < plan.repetitions; ++rep) {
            ExperimentRow row;
            row.instance_id = instances[i].id;
            row.set = instances[i].set;
            row.variant = v;
            row.c = plan.c_values[ci];
            row.sims = plan.sim_budgets[si];
            row.rep = rep;
            row.seed = derive_seed(plan.base_seed, i, v, ci, si, rep);
            report.rows.push_back(std::move(row));
            cells.push_back({i, ci, si});
          }
        }
      }
    }
  }

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t idx = next++; idx < cells.size(); idx = next++) {
      ExperimentRow& row = report.rows[idx];
      const PreparedInstance& p = instances[cells[idx].instance];
      if (!p.error.empty()) {
        row.error = p.error;
        continue;
      }
      try {
        SearchConfig config;
        config.variant = row.variant;
        config.exploration = row.c;
        config.num_simulations = row.sims;
        config.seed = row.seed;
        config.time_limit_s = plan.time_limit_s;
        const SearchResult r = search(*p.instance, *p.graph, config);
        row.value = r.expected_value;
        row.time_s = r.wall_time_s;
        row.sims_run = r.simulations_run;
        row.sims_per_s =
            r.wall_time_s > 0.0 ? static_cast<double>(r.simulations_run) / r.wall_time_s : 0.0;
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(cells.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
  }
  report.aggregates = aggregate(report.rows);
  return report;
}

std::vector<CellAggregate> aggregate(const std::vector<ExperimentRow>& rows) {
  std::vector<CellAggregate> out;
  for (const ExperimentRow& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const CellAggregate& a) {
      return a.set == row.set && a.variant == row.variant && a.c == row.c && a.sims == row.sims;
    });
    if (it == out.end()) {
      out.push_back({row.set, row.variant, row.c, row.sims, 0.0, 0.0, 0});
      it = std::prev(out.end());
    }
    if (!row.ok()) continue;
    it->mean_value += row.value;
    it->mean_time += row.time_s;
    ++it->count;
  }
  for (CellAggregate& a : out) {
    if (a.count == 0) continue;
    a.mean_value /= static_cast<double>(a.count);
    a.mean_time /= static_cast<double>(a.count);
  }
  return out;
}

std::string report_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << kReportHeader << '\n';
  for (const ExperimentRow& r : report.rows) {
    os << r.instance_id << ',' << to_string(r.variant) << ',' << fmt_double(r.c) << ',' << r.sims
       << ',' << r.rep << ',' << r.seed << ',';
    if (r.ok()) {
      os << fmt_double(r.value) << ',' << fmt_double(r.time_s) << ',' << fmt_double(r.sims_per_s);
    } else {
      os << "nan,nan,nan";
    }
    os << '\n';
  }
  return os.str();
}

std::string report_metadata_json(const ExperimentReport& report) {
  json failures = json::array();
  for (const ExperimentRow& r : report.rows) {
    if (r.ok()) continue;
    failures.push_back({{"instance", r.instance_id},
                        {"variant", std::string(to_string(r.variant))},
                        {"c", r.c},
                        {"sims", r.sims},
                        {"rep", r.rep},
                        {"error", r.error}});
  }
  json root{{"timing_scope", report.timing_scope},
            {"rows", report.rows.size()},
            {"failures", std::move(failures)}};
  return root.dump(1) + "\n";
}

std::string SummaryColumn::label() const {
  return std::string(to_string(variant)) + "/c=" + fmt_double(c) + "/sims=" + std::to_string(sims);
}

std::optional<double> percent_of_baseline(double value, double baseline) {
  if (baseline > 0.0) return value / baseline * 100.0;
  if (baseline == 0.0 && value == 0.0) return 100.0;
  return std::nullopt;
}

SummaryTable summarize(const ExperimentReport& report,
                       const std::map<std::string, double>* baselines) {
  SummaryTable table;
  table.sets = report.set_order;
  for (const ExperimentRow& r : report.rows) {
    if (std::find(table.sets.begin(), table.sets.end(), r.set) == table.sets.end()) {
      table.sets.push_back(r.set);
    }
    const SummaryColumn col{r.variant, r.c, r.sims};
    if (std::find(table.columns.begin(), table.columns.end(), col) == table.columns.end()) {
      table.columns.push_back(col);
    }
  }
  auto set_index = [&](const std::string& s) {
    return static_cast<std::size_t>(std::find(table.sets.begin(), table.sets.end(), s) -
                                    table.sets.begin());
  };
  auto col_index = [&](const SummaryColumn& c) {
    return static_cast<std::size_t>(std::find(table.columns.begin(), table.columns.end(), c) -
                                    table.columns.begin());
  };
  table.cells.assign(table.sets.size(), std::vector<SummaryCell>(table.columns.size()));

  for (const CellAggregate& a : aggregate(report.rows)) {
    SummaryCell& cell = table.cells[set_index(a.set)][col_index({a.variant, a.c, a.sims})];
    cell.mean_value = a.mean_value;
    cell.mean_time = a.mean_time;
    cell.count = a.count;
  }

  if (baselines == nullptr) return table;

  // Members of each set, in first-seen order.
  std::vector<std::vector<std::string>> members(table.sets.size());
  for (const ExperimentRow& r : report.rows) {
    auto& m = members[set_index(r.set)];
    if (std::find(m.begin(), m.end(), r.instance_id) == m.end()) m.push_back(r.instance_id);
  }
  std::set<std::string> warned;
  for (const auto& m : members) {
    for (const std::string& id : m) {
      if (!baselines->contains(id) && warned.insert(id).second) {
        table.warnings.push_back("no baseline for instance " + id +
                                 "; omitted from percentage columns");
      }
    }
  }

  table.set_baseline.assign(table.sets.size(), std::nullopt);
  for (std::size_t s = 0; s < table.sets.size(); ++s) {
    double sum = 0.0;
    bool complete = !members[s].empty();
    for (const std::string& id : members[s]) {
      auto it = baselines->find(id);
      if (it == baselines->end()) {
        complete = false;
        break;
      }
      sum += it->second;
    }
    if (complete) table.set_baseline[s] = sum / static_cast<double>(members[s].size());
  }

  // Per-instance mean value per column, then percentage averaged over the
  // instances of the set that have a baseline.
  for (std::size_t s = 0; s < table.sets.size(); ++s) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const SummaryColumn& col = table.columns[c];
      double pct_sum = 0.0;
      std::size_t pct_n = 0;
      for (const std::string& id : members[s]) {
        auto base = baselines->find(id);
        if (base == baselines->end()) continue;
        double sum = 0.0;
        std::size_t n = 0;
        for (const ExperimentRow& r : report.rows) {
          if (r.ok() && r.instance_id == id && r.variant == col.variant && r.c == col.c &&
              r.sims == col.sims) {
            sum += r.value;
            ++n;
          }
        }
        if (n == 0) continue;
        const auto pct = percent_of_baseline(sum / static_cast<double>(n), base->second);
        if (!pct) continue;
        pct_sum += *pct;
        ++pct_n;
      }
      if (pct_n > 0) table.cells[s][c].percent_of_baseline = pct_sum / static_cast<double>(pct_n);
    }
  }
  return table;
}

std::string summary_long_csv(const SummaryTable& table) {
  std::ostringstream os;
  os << "set,variant,c,sims,runs,mean_value,mean_time_s,pct_of_baseline\n";
  for (std::size_t s = 0; s < table.sets.size(); ++s) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const SummaryCell& cell = table.cells[s][c];
      if (cell.count == 0) continue;
      const SummaryColumn& col = table.columns[c];
      os << table.sets[s] << ',' << to_string(col.variant) << ',' << fmt_double(col.c) << ','
         << col.sims << ',' << cell.count << ',' << fmt_fixed(cell.mean_value, 6) << ','
         << fmt_fixed(cell.mean_time, 6) << ','
         << (cell.percent_of_baseline ? fmt_fixed(*cell.percent_of_baseline, 2) : "") << '\n';
    }
  }
  return os.str();
}

std::string summary_table_csv(const SummaryTable& table) {
  std::ostringstream os;
  os << "problem_set,expected_value";
  for (const SummaryColumn& col : table.columns) os << ',' << col.label();
  os << '\n';

  const bool have_baselines = !table.set_baseline.empty();
  std::vector<double> col_value(table.columns.size(), 0.0);
  std::vector<double> col_time(table.columns.size(), 0.0);
  std::vector<std::size_t> col_n(table.columns.size(), 0);
  std::vector<double> col_pct(table.columns.size(), 0.0);
  std::vector<std::size_t> col_pct_n(table.columns.size(), 0);
  double baseline_sum = 0.0;
  std::size_t baseline_n = 0;

  for (std::size_t s = 0; s < table.sets.size(); ++s) {
    os << table.sets[s] << ',';
    if (have_baselines && table.set_baseline[s]) {
      os << fmt_fixed(*table.set_baseline[s], 2);
      baseline_sum += *table.set_baseline[s];
      ++baseline_n;
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const SummaryCell& cell = table.cells[s][c];
      os << ',';
      if (cell.count == 0) continue;
      os << fmt_fixed(cell.mean_value, 2);
      col_value[c] += cell.mean_value;
      col_time[c] += cell.mean_time;
      ++col_n[c];
      if (cell.percent_of_baseline) {
        col_pct[c] += *cell.percent_of_baseline;
        ++col_pct_n[c];
      }
    }
    os << '\n';
  }

  os << "Average,";
  if (baseline_n > 0) os << fmt_fixed(baseline_sum / static_cast<double>(baseline_n), 2);
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    os << ',';
    if (col_n[c] > 0) os << fmt_fixed(col_value[c] / static_cast<double>(col_n[c]), 2);
  }
  os << "\nAverage Time (s),";
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    os << ',';
    if (col_n[c] > 0) os << fmt_fixed(col_time[c] / static_cast<double>(col_n[c]), 2);
  }
  os << '\n';
  if (have_baselines) {
    os << "Average Percentage of Expected Value,";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      os << ',';
      if (col_pct_n[c] > 0) os << fmt_fixed(col_pct[c] / static_cast<double>(col_pct_n[c]), 2);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace satsched
