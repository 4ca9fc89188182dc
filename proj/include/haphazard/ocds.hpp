#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "haphazard/learner.hpp"
#include "haphazard/scaler.hpp"

namespace haphazard {

struct OcdsParams {
  int T = 16;            // steps between re-estimations of the mixing factor k
  double alpha = 1e-4;   // reconstruction-side learning-rate scale
  double beta0 = 1e-4;   // scale of the squared-error term
  double beta1 = 1e-4;   // l1 subgradient scale
  double beta2 = 1e-4;   // graph-smoothness scale
  std::optional<double> fixed_k;  // pin k instead of re-estimating
  double decay = 0.99;   // co-moment exponential decay per instance
  bool standardize = false;
};

// Linear learner over observed features mixed with a second head over
// graph-reconstructed unobserved features. The relatedness graph is a
// row-normalized exponentially decayed co-moment matrix.
class OcdsLearner : public OnlineLearner {
 public:
  explicit OcdsLearner(const OcdsParams& params);

  std::string_view model_name() const override { return "ocds"; }
  bool deterministic() const override { return true; }
  bool diverged() const override { return diverged_; }

  // x_u = sum over observed o of Ghat[u,o] * x_o, for unobserved known u.
  std::map<FeatureId, double> reconstruct(const HaphazardInstance& inst) const;
  const std::map<FeatureId, double>& observed_weights() const { return w_; }
  const std::map<FeatureId, double>& reconstructed_weights() const { return wt_; }
  double mixing_k() const { return k_; }

 protected:
  Prediction do_predict(const HaphazardInstance& inst) override;
  void do_update(const HaphazardInstance& inst) override;

 private:
  struct CoMoment {
    double value = 0.0;
    std::int64_t at = 0;  // step of last rescale, for lazy exponential decay
  };

  double comoment_now(FeatureId a, FeatureId b) const;  // symmetric lookup
  double row_abs_sum(FeatureId a) const;
  double ghat(FeatureId a, FeatureId b) const;
  void flag_if_nonfinite(double v);

  OcdsParams params_;
  std::map<FeatureId, double> w_;   // observed-space weights over all known features
  std::map<FeatureId, double> wt_;  // reconstructed-space weights
  std::map<FeatureId, std::map<FeatureId, CoMoment>> s_;  // upper triangle, a <= b
  double k_ = 0.5;
  std::int64_t step_ = 0;
  std::uint64_t correct_w_ = 0, correct_wt_ = 0;
  bool diverged_ = false;
  RunningScaler scaler_;
};

}  // namespace haphazard
