#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nnd/core.hpp"
#include "nnd/density.hpp"
#include "nnd/generator_config.hpp"
#include "nnd/solvers.hpp"

namespace nnd {

struct ExperimentConfig {
  GeneratorConfig generator;
  std::size_t count = 100;
  SolveConfig solver;
  // When set, every instance is also solved with this algorithm; gaps,
  // defect rate and rho then refer to the reference tour.
  std::optional<Algorithm> reference;
  DensityOptions density;
  double defect_threshold = kDefaultDefectThreshold;
  int histogram_bins = 20;
  // Parallel family only: draw noise parameters per instance (see
  // sweep_parallel_config).
  bool sweep = false;
  std::filesystem::path out_dir;
  int jobs = 1;
};

// Throws Error(kInvalidConfig) naming the first violated constraint.
void validate(const ExperimentConfig& cfg);

// Settings file: one `key = value` per line, '#' starts a comment. Keys are
// the long CLI flag names with '-' or '_' (family, n, count, seed, algo,
// restarts, ...). Duplicate keys: the last one wins.
using Settings = std::map<std::string, std::string>;
Settings parse_settings(std::string_view text);

// Builds a config from settings. Throws Error(kInvalidConfig) for unknown
// keys, keys that do not apply to the chosen family, or bad values.
ExperimentConfig experiment_from_settings(const Settings& settings);

nlohmann::json experiment_to_json(const ExperimentConfig& cfg);

struct InstanceRow {
  std::string name;
  int n = 0;
  std::string family;
  std::uint64_t seed = 0;
  std::optional<double> tour_len;
  std::optional<double> opt_len;
  std::optional<double> gap;
  std::optional<double> rho;
  std::optional<int> tie_count;
  std::string error;  // empty when the row completed

  bool ok() const noexcept { return error.empty(); }
};

struct PipelineSummary {
  std::string family;
  int n = 0;
  std::size_t count = 0;
  std::size_t completed = 0;
  double rho_mean = 0.0;
  double rho_sd = 0.0;
  double mean_len = 0.0;
  std::optional<double> defect_rate;
  std::optional<GapSummary> gaps;
  std::vector<HistogramBin> histogram;
};

struct PipelineReport {
  ExperimentConfig config;
  std::vector<InstanceRow> rows;
  PipelineSummary summary;
};

// Columns: name,n,family,seed,tour_len,opt_len,gap,rho,tie_count,error.
// Numbers use the shortest round-trip decimal form; missing values are empty.
std::string rows_to_csv(std::span<const InstanceRow> rows);
std::vector<InstanceRow> rows_from_csv(std::string_view text);

// Recomputes the summary from rows exactly as the pipeline does.
PipelineSummary summarize_rows(std::span<const InstanceRow> rows, double defect_threshold,
                               int histogram_bins);

nlohmann::json summary_to_json(const PipelineSummary& summary, const ExperimentConfig& cfg);
std::string histogram_to_csv(std::span<const HistogramBin> bins);

// generate -> solve -> score. Per-instance failures land in the row's error
// field. Output depends only on the config, never on `jobs`.
PipelineReport run_pipeline(const ExperimentConfig& cfg);

// Writes instances.csv, summary.json and histogram.csv into `dir`.
void write_report(const PipelineReport& report, const std::filesystem::path& dir);

// Files are matched on their name up to the first '.', so "eil51.tsp"
// pairs with "eil51.opt.tour" and "a.json" with "a.json".
std::string match_key(const std::filesystem::path& path);

struct FilePair {
  std::filesystem::path instance;
  std::filesystem::path tour;
};

// Sorted by key. Throws Error(kInvalidInput) naming the first file of either
// directory that has no partner.
std::vector<FilePair> pair_files(const std::filesystem::path& instances_dir,
                                 const std::filesystem::path& tours_dir);

// Regular files of `dir`, sorted by name.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir);

struct EvalRow {
  std::string name;
  std::optional<double> tour_len;
  std::optional<double> ref_len;
  std::optional<double> gap;
  std::optional<double> rho;  // of the reference tour
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::size_t evaluated = 0;
  std::optional<double> defect_rate;
  std::optional<GapSummary> gaps;
  std::vector<DefectBin> by_rho;
  double threshold = kDefaultDefectThreshold;
};

// Every instance in `instances_dir` gets a row. A missing or invalid
// candidate or reference tour becomes that row's error.
EvalReport evaluate_external_tours(const std::filesystem::path& instances_dir,
                                   const std::filesystem::path& tours_dir,
                                   const std::filesystem::path& reference_dir,
                                   double threshold = kDefaultDefectThreshold,
                                   const DensityOptions& density = {}, int bins = 10);

std::string eval_rows_to_csv(std::span<const EvalRow> rows);
std::string defect_bins_to_csv(std::span<const DefectBin> bins);
nlohmann::json eval_to_json(const EvalReport& report);

// Nearest-neighbour pairs {i, j} (i < j) that are not tour edges.
std::vector<std::pair<NodeId, NodeId>> uncovered_nn_edges(const Instance& instance,
                                                          std::span<const NodeId> order,
                                                          const NeighborSets& sets);

// SVG overlay: class "tour" lines, class "nn-uncovered" lines and class
// "node" circles inside a padded bounding box.
std::string render_overlay(const Instance& instance, std::span<const NodeId> order,
                           const NeighborSets& sets);

struct CalibrationRow {
  double k = 0.0;
  double rho_mean = 0.0;
  double rho_sd = 0.0;
};

struct Calibration {
  std::vector<CalibrationRow> rows;
  double best_k = 0.0;  // closest mean to the target; ties keep the smaller k
  double target = 0.0;
};

// Mean scale-free rho for each k over `count` instances of `base`.
Calibration calibrate_scale_free(const ScaleFreeConfig& base, std::span<const double> ks,
                                 std::size_t count, double target, std::uint64_t master_seed,
                                 const SolveConfig& solver, int jobs = 1);

inline constexpr double kScaleFreeTarget = 0.7571;

}  // namespace nnd
