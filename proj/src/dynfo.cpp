#include "haphazard/dynfo.hpp"

#include <algorithm>
#include <cmath>

#include "haphazard/error.hpp"

namespace haphazard {

DynfoLearner::DynfoLearner(const DynfoParams& params, std::uint64_t seed)
    : params_(params), rng_(seed), buffer_(static_cast<std::size_t>(params.N)) {
  if (params.M < 1 || params.N < 1)
    raise(Errc::invalid_input, "dynfo M and N must be >= 1");
  if (!(params.theta1 > 0.0 && params.theta1 <= params.theta2))
    raise(Errc::invalid_input, "dynfo requires 0 < theta1 <= theta2");
  if (!(params.delta > 0.0 && params.delta <= 1.0))
    raise(Errc::invalid_input, "dynfo delta must be in (0,1]");
}

std::vector<FeatureId> DynfoLearner::sample_subset(const std::vector<FeatureId>& extra) {
  std::vector<FeatureId> pool = universe_.known_ids();
  const std::size_t want = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(params_.delta * static_cast<double>(pool.size()))));
  std::vector<FeatureId> subset(extra);
  // Without-replacement sample on top of any forced features.
  for (std::size_t i = 0; i < pool.size() && subset.size() < want + extra.size(); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng_)]);
    if (std::find(subset.begin(), subset.end(), pool[i]) == subset.end())
      subset.push_back(pool[i]);
  }
  std::sort(subset.begin(), subset.end());
  subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
  return subset;
}

void DynfoLearner::fit_weak(Weak& weak) {
  // Best stump across the accepted subset by buffer balanced accuracy.
  auto view = buffer_.view();
  double best_quality = -1.0;
  DecisionStump best;
  for (FeatureId f : weak.accepted) {
    double quality = 0.0;
    DecisionStump s = stump_fit(view, f, weak.stump.weight, &quality);
    if (quality > best_quality) {
      best_quality = quality;
      best = s;
    }
  }
  if (best_quality < 0.0 && !weak.accepted.empty())
    best = stump_fit(view, weak.accepted.front(), weak.stump.weight);
  weak.stump = best;
  weak.last_refit_step = step_;
}

void DynfoLearner::spawn(const std::vector<FeatureId>& force_features) {
  Weak weak;
  weak.accepted = sample_subset(force_features);
  if (weak.accepted.empty()) return;
  weak.stump.weight = params_.theta2;
  fit_weak(weak);
  weaks_.push_back(std::move(weak));
}

Prediction DynfoLearner::do_predict(const HaphazardInstance& inst) {
  cached_votes_.assign(weaks_.size(), -1);
  double vote[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < weaks_.size(); ++i) {
    auto v = inst.value(weaks_[i].stump.split_feature);
    if (!v) continue;
    const int cls = weaks_[i].stump.predict(*v);
    cached_votes_[i] = cls;
    vote[cls] += weaks_[i].stump.weight;
  }
  Prediction p;
  const double total = vote[0] + vote[1];
  if (vote[1] > vote[0]) {
    p.label = 1;
  } else if (vote[0] > vote[1]) {
    p.label = 0;
  } else {
    // Tie or nobody able to vote: running label majority.
    p.label = label_count_[1] > label_count_[0] ? 1 : 0;
  }
  if (total > 0.0)
    p.score = vote[1] / total;
  else if (label_count_[0] + label_count_[1] > 0)
    p.score = static_cast<double>(label_count_[1]) /
              static_cast<double>(label_count_[0] + label_count_[1]);
  else
    p.score = 0.5;
  return p;
}

void DynfoLearner::do_update(const HaphazardInstance& inst) {
  // 1. Multiplicative weight updates from the cached votes.
  for (std::size_t i = 0; i < weaks_.size(); ++i) {
    Weak& weak = weaks_[i];
    if (i < cached_votes_.size() && cached_votes_[i] >= 0) {
      const bool correct = cached_votes_[i] == inst.label;
      weak.stump.weight *= correct ? (1.0 + params_.alpha) : (1.0 - params_.alpha);
      weak.errs.push_back(correct ? 0 : 1);
      while (weak.errs.size() > 20) weak.errs.pop_front();
    } else {
      weak.stump.weight *= (1.0 - params_.epsilon);
    }
    weak.stump.weight = std::clamp(weak.stump.weight, params_.theta1, params_.theta2);
  }

  // 2. Absorb the instance into universe, counts, and buffer.
  const FeatureDisposition disposition = classify_features(inst, universe_);
  universe_.absorb(inst);
  ++label_count_[inst.label];
  buffer_.push(inst);
  ++step_;

  // 3. Keep-or-discard for stumps whose rolling error exceeds gamma; kept
  // stumps are refit from the buffer. Needs 10 recorded votes of evidence.
  std::vector<Weak> kept;
  kept.reserve(weaks_.size());
  for (auto& weak : weaks_) {
    double err = 0.0;
    for (int e : weak.errs) err += e;
    const bool evaluable = weak.errs.size() >= 10;
    if (evaluable && err / static_cast<double>(weak.errs.size()) > params_.gamma) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      if (u(rng_) < params_.beta) {
        fit_weak(weak);
        weak.errs.clear();
        kept.push_back(std::move(weak));
      }
      // else discarded
    } else {
      kept.push_back(std::move(weak));
    }
  }
  weaks_ = std::move(kept);

  // 4. Scheduled refresh so stumps born on thin buffers recover.
  for (auto& weak : weaks_)
    if (step_ - weak.last_refit_step >= 20) fit_weak(weak);

  // 5. Spawning: sudden features force a stump that covers them (evicting the
  // lightest stump at capacity); otherwise top up at a bounded rate.
  if (!disposition.sudden.empty()) {
    if (weaks_.size() >= static_cast<std::size_t>(params_.M)) {
      std::size_t lightest = 0;
      for (std::size_t i = 1; i < weaks_.size(); ++i)
        if (weaks_[i].stump.weight < weaks_[lightest].stump.weight) lightest = i;
      weaks_.erase(weaks_.begin() + static_cast<std::ptrdiff_t>(lightest));
    }
    spawn(disposition.sudden);
  }
  const std::size_t rate = std::max<std::size_t>(1, static_cast<std::size_t>(params_.M) / 100);
  for (std::size_t i = 0;
       i < rate && weaks_.size() < static_cast<std::size_t>(params_.M) && universe_.total_known() > 0;
       ++i)
    spawn({});
}

}  // namespace haphazard
