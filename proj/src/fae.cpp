#include "haphazard/fae.hpp"

#include <algorithm>

#include "haphazard/error.hpp"

namespace haphazard {

FaeLearner::FaeLearner(const FaeParams& params) : params_(params) {
  if (params.m < 0 || params.p < 1 || params.r < 0 || params.N < 1)
    raise(Errc::invalid_input, "fae lifecycle parameters out of range");
  if (!(params.f >= 0.0) || !(params.M > 0.0 && params.M <= 1.0))
    raise(Errc::invalid_input, "fae f must be >= 0 and M in (0,1]");
}

double FaeLearner::member_weight(const Member& member) const {
  int correct = 0;
  for (int c : member.recent) correct += c;
  return (static_cast<double>(correct) + 1.0) /
         (static_cast<double>(member.recent.size()) + 2.0);
}

std::vector<std::set<FeatureId>> FaeLearner::member_feature_sets() const {
  std::vector<std::set<FeatureId>> out;
  for (const auto& m : members_) out.push_back(m.feature_set);
  return out;
}

void FaeLearner::spawn_member(std::int64_t t) {
  Member member;
  auto list = shared_.top_fraction(params_.M);
  member.feature_list = list;
  member.feature_set.insert(list.begin(), list.end());
  member.birth_t = t;
  members_.push_back(std::move(member));
  last_spawn_t_ = t;
}

Prediction FaeLearner::do_predict(const HaphazardInstance& inst) {
  if (members_.empty()) return {0, 0.5};
  for (auto& member : members_)
    member.cached_vote = member.nb.predict(inst, member.feature_list).label;
  // Members younger than m do not vote unless nobody else can.
  double vote[2] = {0.0, 0.0};
  bool any_eligible = false;
  for (const auto& member : members_)
    if (inst.t - member.birth_t >= params_.m) any_eligible = true;
  for (const auto& member : members_) {
    if (any_eligible && inst.t - member.birth_t < params_.m) continue;
    vote[member.cached_vote] += member_weight(member);
  }
  Prediction p;
  p.label = vote[1] > vote[0] ? 1 : 0;
  const double total = vote[0] + vote[1];
  p.score = total > 0.0 ? vote[1] / total : 0.5;
  return p;
}

void FaeLearner::do_update(const HaphazardInstance& inst) {
  now_ = inst.t;
  if (members_.empty()) {
    // Single-instance warm start: the first member covers the initial ranking.
    shared_.observe(inst);
    spawn_member(inst.t);
    members_.back().nb.observe_restricted(inst, members_.back().feature_set);
    return;
  }

  for (auto& member : members_) {
    member.recent.push_back(member.cached_vote == inst.label ? 1 : 0);
    while (static_cast<int>(member.recent.size()) > params_.N) member.recent.pop_front();
    member.nb.observe_restricted(inst, member.feature_set);
  }
  shared_.observe(inst);

  // Retirement: p consecutive steps strictly below the ensemble mean weight,
  // counted only once a member is old enough to vote. The last member stays.
  double mean_weight = 0.0;
  for (const auto& member : members_) mean_weight += member_weight(member);
  mean_weight /= static_cast<double>(members_.size());
  for (auto& member : members_) {
    if (inst.t - member.birth_t >= params_.m && member_weight(member) < mean_weight)
      ++member.below_streak;
    else
      member.below_streak = 0;
  }
  std::vector<Member> survivors;
  for (auto& member : members_)
    if (member.below_streak < params_.p) survivors.push_back(std::move(member));
  if (survivors.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < members_.size(); ++i) {
      if (member_weight(members_[i]) > member_weight(members_[best]) ||
          (member_weight(members_[i]) == member_weight(members_[best]) &&
           members_[i].birth_t < members_[best].birth_t))
        best = i;
    }
    survivors.push_back(std::move(members_[best]));
  }
  members_ = std::move(survivors);

  // Spawn when the feature space drifted away from the youngest member's set
  // and the spawn cool-down has elapsed.
  if (last_spawn_t_ < 0 || inst.t - last_spawn_t_ >= params_.r) {
    auto top_list = shared_.top_fraction(params_.M);
    std::set<FeatureId> top(top_list.begin(), top_list.end());
    const Member* youngest = &members_.front();
    for (const auto& member : members_)
      if (member.birth_t > youngest->birth_t) youngest = &member;
    std::size_t inter = 0;
    for (FeatureId id : top) inter += youngest->feature_set.count(id);
    const std::size_t uni = top.size() + youngest->feature_set.size() - inter;
    const double diff =
        uni == 0 ? 0.0 : 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
    if (diff > params_.f) {
      spawn_member(inst.t);
      members_.back().nb.observe_restricted(inst, members_.back().feature_set);
    }
  }
}

}  // namespace haphazard
