#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "haphazard/learner.hpp"

namespace haphazard {

// Shared incremental naive-Bayes machinery: per-feature per-class running
// moments for Gaussian likelihoods, presence counts for chi-square ranking,
// add-one smoothed class priors.
class NaiveBayesCore {
 public:
  // Absorbs every observed feature of the instance.
  void observe(const HaphazardInstance& inst);
  // Absorbs only features inside `allowed`.
  void observe_restricted(const HaphazardInstance& inst, const std::set<FeatureId>& allowed);

  // Chi-square of the add-one smoothed 2x2 presence/class table; exactly 0
  // for a feature with no observations.
  double chi2_presence(FeatureId id) const;

  // Top ceil(fraction * known) features by (chi2 desc, id asc).
  std::vector<FeatureId> top_fraction(double fraction) const;

  // (log P(c=0|x), log P(c=1|x)) up to the shared normalizer, using only
  // use_features ∩ observed. Gaussian likelihood with variance floored at
  // 1e-6; classes without moments for a feature fall back to pooled moments.
  std::pair<double, double> log_posteriors(const HaphazardInstance& inst,
                                           const std::vector<FeatureId>& use_features) const;

  Prediction predict(const HaphazardInstance& inst,
                     const std::vector<FeatureId>& use_features) const;

  std::size_t known_features() const { return stats_.size(); }
  std::uint64_t class_count(int label) const { return class_n_[label]; }
  std::uint64_t presence_count(FeatureId id, int label) const;

 private:
  struct Moments {
    std::uint64_t count = 0;
    double sum = 0.0;
    double sumsq = 0.0;
  };
  struct FeatureStats {
    Moments cls[2];
  };
  std::map<FeatureId, FeatureStats> stats_;  // ordered: deterministic iteration
  std::uint64_t class_n_[2] = {0, 0};
};

struct Nb3Params {
  double n_fraction = 1.0;  // proportion of known features kept by chi-square rank
};

class Nb3Learner : public OnlineLearner {
 public:
  explicit Nb3Learner(const Nb3Params& params);

  std::string_view model_name() const override { return "nb3"; }
  bool deterministic() const override { return true; }
  bool needs_pretraining() const override { return true; }

  double chi2_score(FeatureId id) const { return core_.chi2_presence(id); }
  std::vector<FeatureId> selected_features() const { return core_.top_fraction(params_.n_fraction); }
  const NaiveBayesCore& core() const { return core_; }

 protected:
  Prediction do_predict(const HaphazardInstance& inst) override;
  void do_update(const HaphazardInstance& inst) override;

 private:
  Nb3Params params_;
  NaiveBayesCore core_;
};

}  // namespace haphazard
