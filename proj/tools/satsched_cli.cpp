// Command-line front end: instance generation, solving, validation, scoring,
// baselines and benchmark sweeps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "satsched/baselines.hpp"
#include "satsched/feasibility.hpp"
#include "satsched/graph.hpp"
#include "satsched/harness.hpp"
#include "satsched/instance.hpp"
#include "satsched/json_io.hpp"
#include "satsched/mcts.hpp"
#include "satsched/scoring.hpp"

namespace fs = std::filesystem;
using namespace satsched;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}


std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void emit_schedule(const fs::path& instance_path, const Schedule& sched, double value,
                   const std::string& out) {
  const ScheduleFile file{instance_path.stem().string(), sched, value};
  if (out.empty() || out == "-") {
    std::cout << serialize_schedule(file);
  } else {
    save_schedule(file, out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-orbit satellite collection scheduling with Monte Carlo Tree Search"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a random instance");
  GeneratorParams gp;
  std::string gen_params_file, gen_out;
  gen->add_option("--params", gen_params_file, "JSON file with generator parameters");
  gen->add_option("--orbits", gp.num_orbits, "Number of orbits");
  gen->add_option("--tasks", gp.num_tasks, "Number of tasks");
  gen->add_option("--seed", gp.seed, "Random seed");
  gen->add_option("--visibility", gp.visibility_rate, "Probability a task is visible per orbit");
  gen->add_option("--tightness", gp.capacity_tightness, "Capacity tightness in (0, 1]");
  gen->add_option("--out", gen_out, "Output instance file")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "Run MCTS on an instance");
  std::string solve_instance, solve_variant = "max", solve_out;
  SearchConfig sc;
  double time_limit = 0.0;
  solve->add_option("--instance", solve_instance, "Instance file")->required();
  solve->add_option("--variant", solve_variant, "average | max")
      ->check(CLI::IsMember({"average", "max"}));
  solve->add_option("--c", sc.exploration, "Exploration coefficient");
  solve->add_option("--sims", sc.num_simulations, "Simulation budget");
  solve->add_option("--seed", sc.seed, "Random seed");
  solve->add_option("--out", solve_out, "Schedule output file");
  solve->add_option("--time-limit", time_limit, "Wall-clock limit in seconds");

  // validate / score
  auto* validate = app.add_subcommand("validate", "Check a schedule against all constraints");
  std::string val_instance, val_schedule;
  bool val_json = false;
  validate->add_option("--instance", val_instance, "Instance file")->required();
  validate->add_option("--schedule", val_schedule, "Schedule file")->required();
  validate->add_flag("--json", val_json, "Machine-readable report");

  auto* score = app.add_subcommand("score", "Expected value of a schedule");
  std::string score_instance, score_schedule;
  score->add_option("--instance", score_instance, "Instance file")->required();
  score->add_option("--schedule", score_schedule, "Schedule file")->required();

  // baselines
  auto* oracle = app.add_subcommand("oracle", "Exhaustive optimum (small instances)");
  std::string oracle_instance, oracle_out;
  oracle->add_option("--instance", oracle_instance, "Instance file")->required();
  oracle->add_option("--out", oracle_out, "Schedule output file");

  auto* greedy_cmd = app.add_subcommand("greedy", "Greedy constructive baseline");
  std::string greedy_instance, greedy_out;
  greedy_cmd->add_option("--instance", greedy_instance, "Instance file")->required();
  greedy_cmd->add_option("--out", greedy_out, "Schedule output file");

  auto* dump = app.add_subcommand("dump-graph", "Graphviz rendering of the scheduling graph");
  std::string dump_instance, dump_out;
  dump->add_option("--instance", dump_instance, "Instance file")->required();
  dump->add_option("--out", dump_out, "DOT output file");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Run a hyperparameter sweep");
  std::string plan_file, report_out, summary_out, summary_long_out, baselines_file;
  unsigned workers = 1;
  bool oracle_baselines = false;
  bench->add_option("--plan", plan_file, "Plan JSON file")->required();
  bench->add_option("--out", report_out, "Per-run report CSV")->required();
  bench->add_option("--workers", workers, "Concurrent cells");
  bench->add_option("--summary", summary_out, "Summary table CSV (sets x variant/c/sims)");
  bench->add_option("--summary-long", summary_long_out, "Summary CSV, one line per cell");
  bench->add_option("--baselines", baselines_file, "JSON object mapping instance id to value");
  bench->add_flag("--oracle-baselines", oracle_baselines,
                  "Use the exhaustive optimum of each instance as its baseline");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      if (!gen_params_file.empty()) {
        std::ifstream in(gen_params_file);
        if (!in) throw std::runtime_error("cannot open " + gen_params_file);
        const GeneratorParams overrides = gp;
        gp = nlohmann::json::parse(in).get<GeneratorParams>();
        // Explicit flags win over the params file.
        if (gen->count("--orbits")) gp.num_orbits = overrides.num_orbits;
        if (gen->count("--tasks")) gp.num_tasks = overrides.num_tasks;
        if (gen->count("--seed")) gp.seed = overrides.seed;
        if (gen->count("--visibility")) gp.visibility_rate = overrides.visibility_rate;
        if (gen->count("--tightness")) gp.capacity_tightness = overrides.capacity_tightness;
      }
      save_instance(generate(gp), gen_out);
      return 0;
    }

    if (*solve) {
      const ProblemInstance inst = load_instance(solve_instance);
      const ScheduleGraph graph = build_graph(inst);
      sc.variant = parse_variant(solve_variant);
      if (solve->count("--time-limit")) sc.time_limit_s = time_limit;
      const SearchResult r = search(inst, graph, sc);
      std::cerr << "expected_value " << fixed6(r.expected_value) << "\n"
                << "wall_time_s " << r.wall_time_s << "\n"
                << "simulations " << r.simulations_run << "\n"
                << "simulations_per_s "
                << (r.wall_time_s > 0 ? static_cast<double>(r.simulations_run) / r.wall_time_s : 0)
                << "\n";
      if (r.completed_by_rollout) std::cerr << "note: final path completed by rollout\n";
      if (solve_out.empty()) {
        std::cout << fixed6(r.expected_value) << "\n";
      } else {
        emit_schedule(solve_instance, r.schedule, r.expected_value, solve_out);
        std::cout << fixed6(r.expected_value) << "\n";
      }
      return 0;
    }

    if (*validate) {
      const ProblemInstance inst = load_instance(val_instance);
      const ScheduleFile sched = load_schedule(val_schedule);
      const std::vector<Violation> violations = validate_schedule(inst, sched.schedule);
      if (val_json) {
        nlohmann::json report;
        report["ok"] = violations.empty();
        report["violations"] = nlohmann::json::array();
        for (const Violation& v : violations) {
          report["violations"].push_back({{"constraint", to_string(v.constraint)},
                                          {"orbit", v.orbit},
                                          {"tasks", v.tasks},
                                          {"message", v.message}});
        }
        std::cout << report.dump(1) << "\n";
      } else if (violations.empty()) {
        std::cout << "ok: schedule satisfies all constraints\n";
      } else {
        std::cout << violations.size() << " violation(s):\n";
        for (const Violation& v : violations) {
          std::cout << "  [" << to_string(v.constraint) << "] orbit " << v.orbit << ": "
                    << v.message << "\n";
        }
      }
      return violations.empty() ? 0 : 1;
    }

    if (*score) {
      const ProblemInstance inst = load_instance(score_instance);
      const ScheduleFile sched = load_schedule(score_schedule);
      std::cout << fixed6(expected_value(inst, sched.schedule)) << "\n";
      return 0;
    }

    if (*oracle || *greedy_cmd) {
      const std::string& path = *oracle ? oracle_instance : greedy_instance;
      const ProblemInstance inst = load_instance(path);
      const ScheduleGraph graph = build_graph(inst);
      const BaselineResult r = *oracle ? oracle_optimal(inst, graph) : greedy(inst, graph);
      std::cout << fixed6(r.value) << "\n";
      const std::string& out = *oracle ? oracle_out : greedy_out;
      if (!out.empty()) emit_schedule(path, r.schedule, r.value, out);
      return 0;
    }

    if (*dump) {
      const ProblemInstance inst = load_instance(dump_instance);
      const std::string dot = to_dot(build_graph(inst), inst);
      if (dump_out.empty()) {
        std::cout << dot;
      } else {
        write_text(dump_out, dot);
      }
      return 0;
    }

    if (*bench) {
      const ExperimentPlan plan = load_plan(plan_file);
      const ExperimentReport report = run_experiment(plan, workers);
      write_text(report_out, report_csv(report));
      write_text(report_out + ".meta.json", report_metadata_json(report));

      std::map<std::string, double> baselines;
      const bool have_baselines = oracle_baselines || !baselines_file.empty();
      if (!baselines_file.empty()) {
        std::ifstream in(baselines_file);
        if (!in) throw std::runtime_error("cannot open " + baselines_file);
        baselines = nlohmann::json::parse(in).get<std::map<std::string, double>>();
      }
      if (oracle_baselines) {
        // Rebuild instances in plan order; ids match the report's.
        for (const InstanceSource& src : plan.instances) {
          for (int j = 0; j < src.count; ++j) {
            const std::string id = instance_id(src, j);
            const ProblemInstance inst = materialize(src, j);
            try {
              baselines[id] = oracle_optimal(inst, build_graph(inst)).value;
            } catch (const OracleRefused& e) {
              std::cerr << "warning: " << id << ": " << e.what() << "\n";
            }
          }
        }
      }
      const SummaryTable table = summarize(report, have_baselines ? &baselines : nullptr);
      for (const std::string& w : table.warnings) std::cerr << "warning: " << w << "\n";
      if (!summary_out.empty()) write_text(summary_out, summary_table_csv(table));
      if (!summary_long_out.empty()) write_text(summary_long_out, summary_long_csv(table));

      std::size_t failed = 0;
      for (const ExperimentRow& r : report.rows) failed += r.ok() ? 0 : 1;
      std::cout << report.rows.size() << " runs, " << failed << " failed\n";
      std::cout << summary_table_csv(table);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
