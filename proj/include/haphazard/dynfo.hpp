#pragma once

#include <cstdint>
#include <deque>
#include <random>
#include <vector>

#include "haphazard/learner.hpp"
#include "haphazard/stump.hpp"

namespace haphazard {

struct DynfoParams {
  double alpha = 0.1;    // weight step on correct/incorrect votes
  double beta = 0.5;     // keep probability for an erring stump
  double delta = 0.001;  // feature bagging fraction per stump
  double epsilon = 0.001;  // weight penalty when unable to vote
  double gamma = 0.5;    // rolling-error threshold triggering keep-or-discard
  int M = 500;           // ensemble cap
  int N = 20;            // buffer capacity
  double theta1 = 0.05;  // weight clamp, lower
  double theta2 = 0.75;  // weight clamp, upper (also the initial weight)
};

// Weighted forest of decision stumps over sampled feature subsets, with a
// 20-instance buffer for fitting and a running-majority fallback.
class DynfoLearner : public OnlineLearner {
 public:
  DynfoLearner(const DynfoParams& params, std::uint64_t seed);

  std::string_view model_name() const override { return "dynfo"; }
  bool deterministic() const override { return false; }

  std::size_t stump_count() const { return weaks_.size(); }
  std::size_t buffer_size() const { return buffer_.size(); }

 protected:
  Prediction do_predict(const HaphazardInstance& inst) override;
  void do_update(const HaphazardInstance& inst) override;

 private:
  struct Weak {
    std::vector<FeatureId> accepted;  // sampled feature subset, sorted
    DecisionStump stump;
    std::deque<int> errs;             // 1 = wrong, over its last 20 votes
    std::int64_t last_refit_step = 0;
  };

  std::vector<FeatureId> sample_subset(const std::vector<FeatureId>& extra);
  void fit_weak(Weak& weak);
  void spawn(const std::vector<FeatureId>& force_features);

  DynfoParams params_;
  std::mt19937_64 rng_;
  InstanceBuffer buffer_;
  std::vector<Weak> weaks_;
  FeatureUniverse universe_;
  std::uint64_t label_count_[2] = {0, 0};
  std::int64_t step_ = 0;
  std::vector<int> cached_votes_;  // -1 unable, else the stump's class vote
};

}  // namespace haphazard
