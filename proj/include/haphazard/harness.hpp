#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "haphazard/dataset.hpp"
#include "haphazard/metrics.hpp"
#include "haphazard/stream.hpp"

namespace haphazard {

// One benchmark configuration: a model with its hyperparameters, an input
// source, an availability level, and the seed schedule.
struct ExperimentSpec {
  std::string model;
  nlohmann::json config = nlohmann::json::object();
  std::string dataset;
  std::string loader = "csv";  // csv | libsvm | stream
  std::string label_column = "-1";
  std::vector<std::string> missing_markers = kDefaultMissingMarkers;
  char delimiter = ',';
  Header header = Header::automatic;
  std::optional<double> p;  // empty: the source is used as-is (real haphazard data)
  std::vector<std::uint64_t> seeds;  // explicit seed list wins over repeats
  int repeats = 0;                   // 0: one run for deterministic models, five otherwise
  bool store_predictions = true;

  nlohmann::json to_json() const;
  static ExperimentSpec from_json(const nlohmann::json& j);
};

// FNV-1a over the canonical (sorted-key) JSON encoding of the spec.
std::string spec_hash(const ExperimentSpec& spec);

// Explicit seeds if given; else 0..repeats-1; else 0..4, collapsed to {0} for
// deterministic models.
std::vector<std::uint64_t> effective_seeds(const ExperimentSpec& spec);

struct RunResult {
  std::uint64_t seed = 0;
  MetricsReport report;
  std::vector<int> predictions;  // kept when store_predictions
  std::vector<double> scores;
  bool failed = false;
  std::string diagnostic;
};

struct RunSummary {
  int runs = 0;
  int failed_runs = 0;
  double mean_bacc = 0.0, std_bacc = 0.0;  // population std; one run gives 0
  double mean_accuracy = 0.0, std_accuracy = 0.0;
  double mean_errors = 0.0;
  double mean_time_s = 0.0, std_time_s = 0.0;
  std::optional<double> mean_auroc, mean_auprc;
};

struct RunRecord {
  std::string hash;
  nlohmann::json spec;
  std::vector<RunResult> runs;
  RunSummary summary;

  nlohmann::json to_json() const;
  static RunRecord from_json(const nlohmann::json& j);
};

// Single ordered pass per seed: fresh stream, fresh learner, predict before
// update at every step. Wall time wraps the loop (plus any warm-start) only.
// Divergence marks the run failed with a diagnostic instead of throwing.
RunRecord run_experiment(const ExperimentSpec& spec);

struct GridCell {
  nlohmann::ordered_json config;
  double score = 0.0;  // mean balanced accuracy; -inf for failed cells
};

struct GridResult {
  nlohmann::ordered_json best_config;
  double best_score = 0.0;
  std::vector<GridCell> cells;
};

// Cartesian product over `grid` (object of value lists or scalars, parameter
// order preserved), each cell evaluated at p = 0.5 with the base spec's seed
// schedule. Argmax of mean balanced accuracy; ties keep the earliest cell in
// declared order. A cell with any failed run scores -inf; all cells failed is
// a search error. Results are identical for every jobs value.
GridResult grid_search(const std::string& model, const nlohmann::ordered_json& grid,
                       ExperimentSpec base, int jobs = 1);

struct BenchmarkReport {
  nlohmann::json json;
  std::string csv;
};

// Win counts per (dataset, p) cell by mean balanced accuracy (ties credit
// every tied model) plus per-model group summaries and aggregate measures.
// grouping: {"small": [datasets...], "medium": [...], "large": [...],
// "susy": dataset, "higgs": dataset}; all keys optional, matched against the
// spec's dataset string. Pure function of its inputs: regenerated reports are
// byte-identical.
BenchmarkReport summarize(const std::vector<RunRecord>& records, const nlohmann::json& grouping);

// Writes <dir>/<hash>.json (byte-stable) and appends hash + written_at to
// <dir>/manifest.jsonl, keeping timestamps out of the record itself.
std::string save_record(const RunRecord& record, const std::string& dir);
RunRecord load_record(const std::string& path);
std::vector<RunRecord> load_records_dir(const std::string& dir);

// Runs fn(0..n-1) on up to `jobs` threads; rethrows the first exception.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace haphazard
