#include "haphazard/stump.hpp"

#include <algorithm>
#include <limits>

namespace haphazard {
namespace {

DecisionStump majority_stump(FeatureId feature, int majority_label, double init_weight) {
  DecisionStump s;
  s.split_feature = feature;
  s.polarity = Polarity::plus;
  // x >= -inf always holds; x >= +inf never does.
  s.threshold = majority_label == 1 ? -std::numeric_limits<double>::infinity()
                                    : std::numeric_limits<double>::infinity();
  s.weight = init_weight;
  return s;
}

double balanced_accuracy_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
  const std::size_t pos = tp + fn, neg = tn + fp;
  if (pos == 0 || neg == 0) return 0.0;  // callers guard; defensive only
  return (static_cast<double>(tp) / pos + static_cast<double>(tn) / neg) / 2.0;
}

}  // namespace

DecisionStump stump_fit(const std::vector<const HaphazardInstance*>& instances, FeatureId feature,
                        double init_weight, double* quality) {
  std::vector<std::pair<double, int>> observed;  // (value, label)
  for (const auto* inst : instances) {
    auto v = inst->value(feature);
    if (v) observed.emplace_back(*v, inst->label);
  }
  std::size_t pos = 0;
  for (const auto& [v, y] : observed) {
    (void)v;
    pos += (y == 1);
  }
  const std::size_t neg = observed.size() - pos;

  if (observed.size() < 2 || pos == 0 || neg == 0) {
    int majority;
    if (!observed.empty()) {
      majority = pos > neg ? 1 : 0;  // tie -> class 0
    } else {
      // Nothing observes the feature: fall back to the buffer's label majority.
      std::size_t all_pos = 0;
      for (const auto* inst : instances) all_pos += (inst->label == 1);
      majority = all_pos * 2 > instances.size() ? 1 : 0;
    }
    if (quality) {
      if (observed.empty())
        *quality = 0.0;
      else
        *quality = static_cast<double>(majority == 1 ? pos : neg) /
                   static_cast<double>(observed.size());
    }
    return majority_stump(feature, majority, init_weight);
  }

  std::vector<double> values;
  values.reserve(observed.size());
  for (const auto& [v, y] : observed) {
    (void)y;
    values.push_back(v);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.size() < 2) {
    // All observing instances share one value: no midpoint exists.
    const int majority = pos > neg ? 1 : (neg > pos ? 0 : 0);
    if (quality)
      *quality =
          static_cast<double>(majority == 1 ? pos : neg) / static_cast<double>(observed.size());
    return majority_stump(feature, majority, init_weight);
  }

  DecisionStump best = majority_stump(feature, pos > neg ? 1 : 0, init_weight);
  double best_quality = -1.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    const double threshold = (values[i] + values[i + 1]) / 2.0;
    for (Polarity polarity : {Polarity::plus, Polarity::minus}) {
      DecisionStump candidate{feature, threshold, polarity, init_weight};
      std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
      for (const auto& [v, y] : observed) {
        const int pred = candidate.predict(v);
        if (y == 1)
          (pred == 1 ? tp : fn)++;
        else
          (pred == 0 ? tn : fp)++;
      }
      const double q = balanced_accuracy_counts(tp, fp, tn, fn);
      // Strict improvement keeps the smallest threshold, then plus polarity.
      if (q > best_quality) {
        best_quality = q;
        best = candidate;
      }
    }
  }
  if (quality) *quality = best_quality;
  return best;
}

DecisionStump stump_fit(const InstanceBuffer& buffer, FeatureId feature, double init_weight,
                        double* quality) {
  return stump_fit(buffer.view(), feature, init_weight, quality);
}

}  // namespace haphazard
