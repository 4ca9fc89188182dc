#include "haphazard/nb3.hpp"

#include <algorithm>
#include <cmath>

#include "haphazard/error.hpp"

namespace haphazard {
namespace {
constexpr double kVarianceFloor = 1e-6;
constexpr double kLog2Pi = 1.8378770664093453;
}  // namespace

void NaiveBayesCore::observe(const HaphazardInstance& inst) {
  for (const auto& [id, value] : inst.x) {
    Moments& m = stats_[id].cls[inst.label];
    ++m.count;
    m.sum += value;
    m.sumsq += value * value;
  }
  ++class_n_[inst.label];
}

void NaiveBayesCore::observe_restricted(const HaphazardInstance& inst,
                                        const std::set<FeatureId>& allowed) {
  for (const auto& [id, value] : inst.x) {
    if (!allowed.count(id)) continue;
    Moments& m = stats_[id].cls[inst.label];
    ++m.count;
    m.sum += value;
    m.sumsq += value * value;
  }
  ++class_n_[inst.label];
}

std::uint64_t NaiveBayesCore::presence_count(FeatureId id, int label) const {
  auto it = stats_.find(id);
  if (it == stats_.end()) return 0;
  return it->second.cls[label].count;
}

double NaiveBayesCore::chi2_presence(FeatureId id) const {
  auto it = stats_.find(id);
  if (it == stats_.end()) return 0.0;
  const std::uint64_t a0 = it->second.cls[0].count, a1 = it->second.cls[1].count;
  if (a0 + a1 == 0) return 0.0;
  // Rows: class; columns: feature observed / not observed. Add-one smoothing
  // keeps every expected cell positive.
  const double obs[2][2] = {
      {static_cast<double>(a0) + 1.0, static_cast<double>(class_n_[0] - a0) + 1.0},
      {static_cast<double>(a1) + 1.0, static_cast<double>(class_n_[1] - a1) + 1.0}};
  const double row[2] = {obs[0][0] + obs[0][1], obs[1][0] + obs[1][1]};
  const double col[2] = {obs[0][0] + obs[1][0], obs[0][1] + obs[1][1]};
  const double total = row[0] + row[1];
  double chi2 = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      const double expected = row[r] * col[c] / total;
      const double diff = obs[r][c] - expected;
      chi2 += diff * diff / expected;
    }
  return chi2;
}

std::vector<FeatureId> NaiveBayesCore::top_fraction(double fraction) const {
  if (!(fraction > 0.0 && fraction <= 1.0))
    raise(Errc::invalid_input, "feature fraction must be in (0,1]");
  std::vector<std::pair<double, FeatureId>> ranked;
  ranked.reserve(stats_.size());
  for (const auto& [id, st] : stats_) {
    (void)st;
    ranked.emplace_back(chi2_presence(id), id);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  const std::size_t keep =
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(ranked.size())));
  std::vector<FeatureId> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep && i < ranked.size(); ++i) out.push_back(ranked[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<double, double> NaiveBayesCore::log_posteriors(
    const HaphazardInstance& inst, const std::vector<FeatureId>& use_features) const {
  const double n = static_cast<double>(class_n_[0] + class_n_[1]);
  double logp[2];
  for (int c = 0; c < 2; ++c)
    logp[c] = std::log((static_cast<double>(class_n_[c]) + 1.0) / (n + 2.0));
  for (const auto& [id, value] : inst.x) {
    if (!std::binary_search(use_features.begin(), use_features.end(), id)) continue;
    auto it = stats_.find(id);
    if (it == stats_.end()) continue;
    const Moments& m0 = it->second.cls[0];
    const Moments& m1 = it->second.cls[1];
    const std::uint64_t pooled_count = m0.count + m1.count;
    if (pooled_count == 0) continue;
    const double pooled_mean = (m0.sum + m1.sum) / static_cast<double>(pooled_count);
    const double pooled_var = std::max(
        (m0.sumsq + m1.sumsq) / static_cast<double>(pooled_count) - pooled_mean * pooled_mean,
        kVarianceFloor);
    for (int c = 0; c < 2; ++c) {
      const Moments& m = it->second.cls[c];
      double mean = pooled_mean, var = pooled_var;
      if (m.count > 0) {
        mean = m.sum / static_cast<double>(m.count);
        var = std::max(m.sumsq / static_cast<double>(m.count) - mean * mean, kVarianceFloor);
      }
      const double diff = value - mean;
      logp[c] += -0.5 * (kLog2Pi + std::log(var)) - diff * diff / (2.0 * var);
    }
  }
  return {logp[0], logp[1]};
}

Prediction NaiveBayesCore::predict(const HaphazardInstance& inst,
                                   const std::vector<FeatureId>& use_features) const {
  const auto [logp0, logp1] = log_posteriors(inst, use_features);
  Prediction p;
  p.label = logp1 > logp0 ? 1 : 0;  // tie -> class 0
  p.score = logistic(logp1 - logp0);
  return p;
}

Nb3Learner::Nb3Learner(const Nb3Params& params) : params_(params) {
  if (!(params.n_fraction > 0.0 && params.n_fraction <= 1.0))
    raise(Errc::invalid_input, "nb3 n must be in (0,1]");
}

Prediction Nb3Learner::do_predict(const HaphazardInstance& inst) {
  return core_.predict(inst, core_.top_fraction(params_.n_fraction));
}

void Nb3Learner::do_update(const HaphazardInstance& inst) { core_.observe(inst); }

}  // namespace haphazard
