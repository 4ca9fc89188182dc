#pragma once

#include <deque>
#include <set>
#include <vector>

#include "haphazard/nb3.hpp"

namespace haphazard {

struct FaeParams {
  int m = 5;        // age before a member's vote counts
  double f = 0.15;  // feature-set difference threshold for spawning
  int p = 3;        // consecutive below-threshold steps before removal
  int r = 10;       // minimum instances between spawns
  int N = 50;       // rolling-accuracy window
  double M = 1.0;   // feature fraction for a new member's feature set
};

// Ensemble of naive-Bayes members with fixed per-member feature sets and a
// spawn/retire lifecycle. Votes are weighted by rolling accuracy.
class FaeLearner : public OnlineLearner {
 public:
  explicit FaeLearner(const FaeParams& params);

  std::string_view model_name() const override { return "fae"; }
  bool deterministic() const override { return true; }
  bool needs_pretraining() const override { return true; }

  std::size_t member_count() const { return members_.size(); }
  std::vector<std::set<FeatureId>> member_feature_sets() const;

 protected:
  Prediction do_predict(const HaphazardInstance& inst) override;
  void do_update(const HaphazardInstance& inst) override;

 private:
  struct Member {
    NaiveBayesCore nb;
    std::set<FeatureId> feature_set;
    std::vector<FeatureId> feature_list;  // sorted copy for posterior lookups
    std::int64_t birth_t = 0;
    std::deque<int> recent;  // 1 = correct, capped at N
    int below_streak = 0;
    int cached_vote = 0;     // member prediction from the current step
  };

  double member_weight(const Member& member) const;  // Laplace rolling accuracy
  void spawn_member(std::int64_t t);

  FaeParams params_;
  NaiveBayesCore shared_;  // full-stream statistics used for feature ranking
  std::vector<Member> members_;
  std::int64_t last_spawn_t_ = -1;
  std::int64_t now_ = 0;
};

}  // namespace haphazard
