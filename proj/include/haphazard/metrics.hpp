#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace haphazard {

struct MetricsReport {
  std::uint64_t n = 0;
  std::uint64_t errors = 0;
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  bool balanced_degenerate = false;  // one class absent: mean over present classes only
  std::optional<double> auroc;       // empty when only one class occurred
  std::optional<double> auprc;
  double wall_time_s = 0.0;

  nlohmann::json to_json() const;
  static MetricsReport from_json(const nlohmann::json& j);
  // bAcc, Time, Err, Acc, ROC, PRC
  std::string csv_row() const;
  static std::string csv_header();
};

// Streaming confusion counts plus retained (score, label) pairs in arrival
// order. One accumulator per run, never shared.
class MetricAccumulator {
 public:
  // score in [0,1]; predicted/label in {0,1}.
  void record(double score, int predicted, int label);

  std::uint64_t n() const { return n_; }
  std::uint64_t tp() const { return tp_; }
  std::uint64_t fp() const { return fp_; }
  std::uint64_t tn() const { return tn_; }
  std::uint64_t fn() const { return fn_; }
  std::uint64_t errors() const { return fp_ + fn_; }
  const std::vector<std::pair<double, int>>& scored() const { return scored_; }

  // Requires n >= 1 and at least one class present.
  MetricsReport finalize(double wall_time_s = 0.0) const;

 private:
  std::uint64_t tp_ = 0, fp_ = 0, tn_ = 0, fn_ = 0, n_ = 0;
  std::vector<std::pair<double, int>> scored_;
};

// Mean of sensitivity and specificity; with one class absent the present
// class's rate is returned alone (degenerate flag raised by the caller).
double balanced_accuracy(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn);

// Probability a random positive outscores a random negative, ties counted
// half (rank form; equals trapezoidal ROC area). Undefined-metric error when
// a class is absent.
double auroc(const std::vector<std::pair<double, int>>& scored);

// Average-precision (step) integration over descending score groups.
double auprc(const std::vector<std::pair<double, int>>& scored);

// changes are signed percentage deltas between consecutive size groups.
// Increases contribute (1+p) to the numerator; decreases (1+|n|)^2 to the
// denominator (0 and 1 when the respective set is empty; exact zeros count as
// neither). printed_form switches the denominator terms to (1+|n|^2).
double data_scalability_measure(const std::vector<double>& changes, bool printed_form = false);

struct GroupStats {
  double mean_bacc = 0.0;  // percentage scale
  double mean_std = 0.0;
  double mean_time_s = 0.0;
};

struct AggregateInput {
  std::optional<GroupStats> small, medium, large;
  std::optional<double> susy_time_s, higgs_time_s;
};

struct AggregateReport {
  std::optional<double> performance;             // mean of group mean bAccs
  std::optional<double> data_scalability;
  std::optional<double> prediction_consistency;  // mean of group mean stds
  std::optional<double> speed;                   // 1 / mean time over groups
  std::optional<double> feature_scalability;     // HIGGS/SUSY time ratio
  std::vector<std::string> gaps;                 // names of inputs that were missing

  nlohmann::json to_json() const;
};

AggregateReport aggregate_report(const AggregateInput& in, bool printed_form = false);

struct HardwareProfile {
  double cores = 0;
  double power_per_core_w = 0;
  double memory_power_w = 0;
  double pue = 1.0;
  double carbon_intensity_g_per_kwh = 0;

  static HardwareProfile from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct CarbonEstimate {
  double energy_kwh = 0;
  double carbon_kg = 0;
};

// energy = hours * (cores*power_per_core + memory_power)/1000 * PUE;
// carbon = energy * intensity/1000.
CarbonEstimate carbon_estimate(double wall_time_s, const HardwareProfile& profile);

}  // namespace haphazard
