#include "haphazard/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "haphazard/error.hpp"

namespace haphazard {

void MetricAccumulator::record(double score, int predicted, int label) {
  if (!(score >= 0.0 && score <= 1.0))
    raise(Errc::invalid_input, "score must be in [0,1]");
  if ((predicted != 0 && predicted != 1) || (label != 0 && label != 1))
    raise(Errc::invalid_input, "predicted and label must be 0 or 1");
  if (label == 1)
    (predicted == 1 ? tp_ : fn_)++;
  else
    (predicted == 0 ? tn_ : fp_)++;
  scored_.emplace_back(score, label);
  ++n_;
}

double balanced_accuracy(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn) {
  const std::uint64_t pos = tp + fn, neg = tn + fp;
  if (pos == 0 && neg == 0) raise(Errc::undefined_metric, "no instances recorded");
  if (pos == 0) return static_cast<double>(tn) / static_cast<double>(neg);
  if (neg == 0) return static_cast<double>(tp) / static_cast<double>(pos);
  const double sens = static_cast<double>(tp) / static_cast<double>(pos);
  const double spec = static_cast<double>(tn) / static_cast<double>(neg);
  return (sens + spec) / 2.0;
}

double auroc(const std::vector<std::pair<double, int>>& scored) {
  std::uint64_t pos = 0, neg = 0;
  for (const auto& [s, y] : scored) {
    (void)s;
    (y == 1 ? pos : neg)++;
  }
  if (pos == 0 || neg == 0)
    raise(Errc::undefined_metric, "AUROC needs both classes");
  // Rank-sum form with midranks for ties.
  std::vector<std::pair<double, int>> sorted = scored;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].first == sorted[i].first) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (sorted[k].second == 1) rank_sum_pos += midrank;
    i = j;
  }
  const double u = rank_sum_pos - static_cast<double>(pos) * (static_cast<double>(pos) + 1) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

double auprc(const std::vector<std::pair<double, int>>& scored) {
  std::uint64_t pos = 0, neg = 0;
  for (const auto& [s, y] : scored) {
    (void)s;
    (y == 1 ? pos : neg)++;
  }
  if (pos == 0 || neg == 0)
    raise(Errc::undefined_metric, "AUPRC needs both classes");
  std::vector<std::pair<double, int>> sorted = scored;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  // Average precision over descending distinct-score groups: equal scores
  // enter the ranking together.
  double ap = 0.0;
  std::uint64_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    std::uint64_t group_tp = 0, group_fp = 0;
    while (j < sorted.size() && sorted[j].first == sorted[i].first) {
      (sorted[j].second == 1 ? group_tp : group_fp)++;
      ++j;
    }
    tp += group_tp;
    fp += group_fp;
    if (group_tp > 0) {
      const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
      ap += static_cast<double>(group_tp) / static_cast<double>(pos) * precision;
    }
    i = j;
  }
  return ap;
}

MetricsReport MetricAccumulator::finalize(double wall_time_s) const {
  if (n_ == 0) raise(Errc::undefined_metric, "no instances recorded");
  MetricsReport rep;
  rep.n = n_;
  rep.errors = errors();
  rep.accuracy = static_cast<double>(n_ - rep.errors) / static_cast<double>(n_);
  rep.balanced_accuracy = balanced_accuracy(tp_, fp_, tn_, fn_);
  rep.balanced_degenerate = (tp_ + fn_ == 0) || (tn_ + fp_ == 0);
  if (!rep.balanced_degenerate) {
    rep.auroc = auroc(scored_);
    rep.auprc = auprc(scored_);
  }
  rep.wall_time_s = wall_time_s;
  return rep;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["errors"] = errors;
  j["accuracy"] = accuracy;
  j["balanced_accuracy"] = balanced_accuracy;
  j["balanced_degenerate"] = balanced_degenerate;
  j["auroc"] = auroc ? nlohmann::json(*auroc) : nlohmann::json(nullptr);
  j["auprc"] = auprc ? nlohmann::json(*auprc) : nlohmann::json(nullptr);
  j["wall_time_s"] = wall_time_s;
  return j;
}

MetricsReport MetricsReport::from_json(const nlohmann::json& j) {
  MetricsReport rep;
  rep.n = j.at("n").get<std::uint64_t>();
  rep.errors = j.at("errors").get<std::uint64_t>();
  rep.accuracy = j.at("accuracy").get<double>();
  rep.balanced_accuracy = j.at("balanced_accuracy").get<double>();
  rep.balanced_degenerate = j.value("balanced_degenerate", false);
  if (j.contains("auroc") && !j["auroc"].is_null()) rep.auroc = j["auroc"].get<double>();
  if (j.contains("auprc") && !j["auprc"].is_null()) rep.auprc = j["auprc"].get<double>();
  rep.wall_time_s = j.value("wall_time_s", 0.0);
  return rep;
}

std::string MetricsReport::csv_header() { return "bAcc,Time,Err,Acc,ROC,PRC"; }

std::string MetricsReport::csv_row() const {
  std::ostringstream out;
  out.precision(10);
  out << balanced_accuracy << ',' << wall_time_s << ',' << errors << ',' << accuracy << ',';
  if (auroc) out << *auroc;
  out << ',';
  if (auprc) out << *auprc;
  return out.str();
}

double data_scalability_measure(const std::vector<double>& changes, bool printed_form) {
  double numerator = 0.0, denominator = 0.0;
  bool any_inc = false, any_dec = false;
  for (double c : changes) {
    if (c > 0.0) {
      numerator += 1.0 + c;
      any_inc = true;
    } else if (c < 0.0) {
      const double mag = -c;
      denominator += printed_form ? 1.0 + mag * mag : (1.0 + mag) * (1.0 + mag);
      any_dec = true;
    }
  }
  if (!any_inc) return 0.0;
  if (!any_dec) denominator = 1.0;
  return numerator / denominator;
}

AggregateReport aggregate_report(const AggregateInput& in, bool printed_form) {
  AggregateReport out;
  if (in.small && in.medium && in.large) {
    const double s = in.small->mean_bacc, m = in.medium->mean_bacc, l = in.large->mean_bacc;
    out.performance = (s + m + l) / 3.0;
    out.prediction_consistency =
        (in.small->mean_std + in.medium->mean_std + in.large->mean_std) / 3.0;
    const double mean_time =
        (in.small->mean_time_s + in.medium->mean_time_s + in.large->mean_time_s) / 3.0;
    if (mean_time > 0.0) out.speed = 1.0 / mean_time;
    if (s != 0.0 && m != 0.0) {
      const std::vector<double> changes = {(m - s) / s * 100.0, (l - m) / m * 100.0};
      out.data_scalability = data_scalability_measure(changes, printed_form);
    } else {
      out.gaps.push_back("data_scalability");
    }
  } else {
    out.gaps.push_back("performance");
    out.gaps.push_back("prediction_consistency");
    out.gaps.push_back("speed");
    out.gaps.push_back("data_scalability");
  }
  if (in.susy_time_s && in.higgs_time_s && *in.susy_time_s > 0.0) {
    out.feature_scalability = *in.higgs_time_s / *in.susy_time_s;
  } else {
    out.gaps.push_back("feature_scalability");
  }
  return out;
}

nlohmann::json AggregateReport::to_json() const {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json j;
  j["performance"] = opt(performance);
  j["data_scalability"] = opt(data_scalability);
  j["prediction_consistency"] = opt(prediction_consistency);
  j["speed"] = opt(speed);
  j["feature_scalability"] = opt(feature_scalability);
  j["gaps"] = gaps;
  return j;
}

HardwareProfile HardwareProfile::from_json(const nlohmann::json& j) {
  HardwareProfile p;
  p.cores = j.at("cores").get<double>();
  p.power_per_core_w = j.at("power_per_core_w").get<double>();
  p.memory_power_w = j.at("memory_power_w").get<double>();
  p.pue = j.at("pue").get<double>();
  p.carbon_intensity_g_per_kwh = j.at("carbon_intensity_g_per_kwh").get<double>();
  if (p.cores <= 0 || p.power_per_core_w <= 0 || p.memory_power_w <= 0 || p.pue < 1.0 ||
      p.carbon_intensity_g_per_kwh <= 0)
    raise(Errc::invalid_input, "hardware profile fields must be positive (pue >= 1)");
  return p;
}

nlohmann::json HardwareProfile::to_json() const {
  nlohmann::json j;
  j["cores"] = cores;
  j["power_per_core_w"] = power_per_core_w;
  j["memory_power_w"] = memory_power_w;
  j["pue"] = pue;
  j["carbon_intensity_g_per_kwh"] = carbon_intensity_g_per_kwh;
  return j;
}

CarbonEstimate carbon_estimate(double wall_time_s, const HardwareProfile& profile) {
  if (wall_time_s < 0) raise(Errc::invalid_input, "wall time must be non-negative");
  CarbonEstimate est;
  const double hours = wall_time_s / 3600.0;
  const double draw_kw =
      (profile.cores * profile.power_per_core_w + profile.memory_power_w) / 1000.0;
  est.energy_kwh = hours * draw_kw * profile.pue;
  est.carbon_kg = est.energy_kwh * profile.carbon_intensity_g_per_kwh / 1000.0;
  return est;
}

}  // namespace haphazard
