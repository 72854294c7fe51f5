#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "satsched/instance.hpp"
#include "satsched/mcts.hpp"

namespace satsched {

/// Either a single instance file or `count` generated instances, the j-th
/// drawn with seed `generator.seed + j`. `set` groups instances into one
/// row of the summary table.
struct InstanceSource {
  std::string set;
  std::optional<std::filesystem::path> path;
  std::optional<GeneratorParams> generator;
  int count = 1;
};

/// Report id of the j-th instance of `src`: "set/stem" for files, "set#j"
/// for generated instances.
std::string instance_id(const InstanceSource& src, int j);
/// Loads or generates the j-th instance of `src`.
ProblemInstance materialize(const InstanceSource& src, int j);

struct ExperimentPlan {
  std::vector<InstanceSource> instances;
  std::vector<Variant> variants{Variant::kMax, Variant::kAverage};
  std::vector<double> c_values{1.5, 5.0, 10.0};
  std::vector<std::uint64_t> sim_budgets{100000};
  int repetitions = 3;
  std::uint64_t base_seed = 0;
  std::optional<double> time_limit_s;

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Relative instance paths are resolved against `base_dir`.
ExperimentPlan parse_plan(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentPlan load_plan(const std::filesystem::path& path);

struct ExperimentRow {
  std::string instance_id;
  std::string set;
  Variant variant = Variant::kMax;
  double c = 0.0;
  std::uint64_t sims = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  double value = 0.0;
  double time_s = 0.0;
  double sims_per_s = 0.0;
  std::uint64_t sims_run = 0;
  std::string error;  ///< non-empty when the cell failed

  bool ok() const { return error.empty(); }
};

/// Mean over the successful rows of one (set, variant, c, sims) cell.
struct CellAggregate {
  std::string set;
  Variant variant = Variant::kMax;
  double c = 0.0;
  std::uint64_t sims = 0;
  double mean_value = 0.0;
  double mean_time = 0.0;
  std::size_t count = 0;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  std::vector<CellAggregate> aggregates;
  std::vector<std::string> set_order;
  /// Timing covers search() only; loading and graph construction excluded.
  std::string timing_scope = "search_only";
};

/// Stable per-cell seed: a mix of the base seed with the instance ordinal,
/// variant, c index, budget index and repetition.
std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t instance, Variant variant,
                          std::size_t c_index, std::size_t sims_index, int rep);

/// Runs every instance x variant x c x budget x repetition cell. Cells run on
/// up to `workers` threads; the report does not depend on the worker count
/// apart from timing columns. Failures are recorded per row.
ExperimentReport run_experiment(const ExperimentPlan& plan, unsigned workers = 1);

std::vector<CellAggregate> aggregate(const std::vector<ExperimentRow>& rows);

inline constexpr const char* kReportHeader = "instance,variant,c,sims,rep,seed,value,time_s,sims_per_s";

std::string report_csv(const ExperimentReport& report);
std::string report_metadata_json(const ExperimentReport& report);

struct SummaryColumn {
  Variant variant;
  double c;
  std::uint64_t sims;
  std::string label() const;
  bool operator==(const SummaryColumn&) const = default;
};

struct SummaryCell {
  double mean_value = 0.0;
  double mean_time = 0.0;
  std::size_t count = 0;
  std::optional<double> percent_of_baseline;
};

struct SummaryTable {
  std::vector<std::string> sets;
  std::vector<SummaryColumn> columns;
  /// cells[set index][column index]; count == 0 marks an empty cell.
  std::vector<std::vector<SummaryCell>> cells;
  /// Mean baseline per set, present only if every instance of the set has one.
  std::vector<std::optional<double>> set_baseline;
  std::vector<std::string> warnings;
};

/// value / baseline * 100; 100 when both are zero, nullopt for any other
/// non-positive baseline.
std::optional<double> percent_of_baseline(double value, double baseline);

SummaryTable summarize(const ExperimentReport& report,
                       const std::map<std::string, double>* baselines = nullptr);

/// One line per (set, variant, c, sims) cell.
std::string summary_long_csv(const SummaryTable& table);

/// Sets as rows and variant x c x sims as columns, followed by the overall
/// average row and the average time row (and the average percentage row when
/// baselines were given).
std::string summary_table_csv(const SummaryTable& table);

}  // namespace satsched
