#pragma once

#include <map>

#include "haphazard/feature_space.hpp"

namespace haphazard {

// Optional learner-side running z-score over observed values. Stats absorb at
// prediction time so the matching update sees the same transform.
class RunningScaler {
 public:
  void absorb(const HaphazardInstance& inst) {
    for (const auto& [id, value] : inst.x) {
      Stat& s = stats_[id];
      ++s.count;
      s.sum += value;
      s.sumsq += value * value;
    }
  }

  HaphazardInstance transform(const HaphazardInstance& inst) const {
    HaphazardInstance out = inst;
    for (auto& [id, value] : out.x) {
      auto it = stats_.find(id);
      if (it == stats_.end() || it->second.count == 0) continue;
      const double mean = it->second.sum / static_cast<double>(it->second.count);
      const double var =
          it->second.sumsq / static_cast<double>(it->second.count) - mean * mean;
      value = (value - mean) / std::sqrt(var > 1e-12 ? var : 1e-12);
    }
    return out;
  }

 private:
  struct Stat {
    std::uint64_t count = 0;
    double sum = 0.0;
    double sumsq = 0.0;
  };
  std::map<FeatureId, Stat> stats_;
};

}  // namespace haphazard
