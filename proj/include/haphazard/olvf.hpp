#pragma once

#include <map>

#include "haphazard/learner.hpp"
#include "haphazard/scaler.hpp"

namespace haphazard {

struct OlvfParams {
  double C = 1.0;        // aggressiveness cap, instance classifier
  double C_bar = 1.0;    // aggressiveness cap, feature-space classifier
  double B = 1.0;        // kept fraction of weights after truncation, in (0,1]
  double lambda = 1e-4;  // decay applied on aggressive steps
  bool standardize = false;
};

// Margin classifier over the shared feature subspace with passive-aggressive
// updates, sparsity truncation, and the companion feature-space classifier
// whose zero-initialized weights provably stay zero.
class OlvfLearner : public OnlineLearner {
 public:
  explicit OlvfLearner(const OlvfParams& params);

  std::string_view model_name() const override { return "olvf"; }
  bool deterministic() const override { return true; }

  const std::map<FeatureId, double>& instance_weights() const { return w_; }
  const std::map<FeatureId, double>& feature_space_weights() const { return wbar_; }
  std::size_t nonzero_weight_count() const;

 protected:
  Prediction do_predict(const HaphazardInstance& inst) override;
  void do_update(const HaphazardInstance& inst) override;

 private:
  double shared_margin(const HaphazardInstance& inst) const;

  OlvfParams params_;
  std::map<FeatureId, double> w_;     // entries for every feature ever seen
  std::map<FeatureId, double> wbar_;  // feature-space classifier, zero init
  RunningScaler scaler_;
};

}  // namespace haphazard
