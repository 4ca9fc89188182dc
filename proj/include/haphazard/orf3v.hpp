#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "haphazard/learner.hpp"
#include "haphazard/stump.hpp"

namespace haphazard {

struct Orf3vParams {
  int forest_size = 10;             // stumps per feature forest
  int replacement_interval = 20;    // steps between replacement sweeps
  std::string update_strategy = "oldest";  // "oldest" or "random"
  double replacement_chance = 0.7;  // random strategy: probability to skip
  int windowsize = 20;              // rolling error window per stump
  double alpha = 0.1;               // multiplicative weight step
  double delta = 0.001;             // confidence for the error-gap prune bound
};

// Per-feature forests of decision stumps. Each feature that has ever been
// observed owns a small forest fit on bootstrap resamples of a shared
// instance buffer; prediction is a weighted vote across the forests of the
// currently observed features.
class Orf3vLearner final : public OnlineLearner {
 public:
  Orf3vLearner(const Orf3vParams& params, std::uint64_t seed);

  std::string_view model_name() const override { return "orf3v"; }
  bool deterministic() const override { return false; }

  std::size_t forest_count() const { return forests_.size(); }
  std::size_t stump_count() const;

  // Gap threshold for dropping a stump whose rolling error exceeds the
  // forest mean: sqrt(ln(1/delta) / (2 n)) over an n-vote window.
  static double error_gap_bound(double delta, std::size_t n);

 protected:
  Prediction do_predict(const HaphazardInstance& inst) override;
  void do_update(const HaphazardInstance& inst) override;

 private:
  struct FStump {
    DecisionStump stump;
    std::deque<int> errs;  // 1 = wrong, capped at windowsize
    std::int64_t birth = 0;
  };
  struct Forest {
    std::vector<FStump> stumps;
  };

  FStump make_stump(FeatureId feature);
  void top_up(FeatureId feature, Forest& forest);

  Orf3vParams params_;
  std::mt19937_64 rng_;
  InstanceBuffer buffer_;
  std::map<FeatureId, Forest> forests_;
  std::int64_t label_count_[2] = {0, 0};
  std::int64_t step_ = 0;
};

}  // namespace haphazard
