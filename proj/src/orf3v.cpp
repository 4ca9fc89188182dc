#include "haphazard/orf3v.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "haphazard/error.hpp"

namespace haphazard {

Orf3vLearner::Orf3vLearner(const Orf3vParams& params, std::uint64_t seed)
    : params_(params),
      rng_(seed),
      buffer_(static_cast<std::size_t>(std::max(params.windowsize, 1))) {
  if (params.forest_size < 1) raise(Errc::invalid_input, "orf3v forestSize must be >= 1");
  if (params.replacement_interval < 1)
    raise(Errc::invalid_input, "orf3v replacementInterval must be >= 1");
  if (params.update_strategy != "oldest" && params.update_strategy != "random")
    raise(Errc::invalid_input, "orf3v updateStrategy must be 'oldest' or 'random'");
  if (!(params.replacement_chance >= 0.0 && params.replacement_chance <= 1.0))
    raise(Errc::invalid_input, "orf3v replacementChance must be in [0,1]");
  if (params.windowsize < 1) raise(Errc::invalid_input, "orf3v windowsize must be >= 1");
  if (!(params.delta > 0.0 && params.delta < 1.0))
    raise(Errc::invalid_input, "orf3v delta must be in (0,1)");
}

double Orf3vLearner::error_gap_bound(double delta, std::size_t n) {
  if (n == 0) return std::numeric_limits<double>::infinity();
  return std::sqrt(std::log(1.0 / delta) / (2.0 * static_cast<double>(n)));
}

std::size_t Orf3vLearner::stump_count() const {
  std::size_t n = 0;
  for (const auto& [id, forest] : forests_) n += forest.stumps.size();
  return n;
}

Orf3vLearner::FStump Orf3vLearner::make_stump(FeatureId feature) {
  // Fit on a bootstrap resample of the buffer so sibling stumps differ.
  auto view = buffer_.view();
  std::vector<const HaphazardInstance*> sample;
  if (!view.empty()) {
    sample.reserve(view.size());
    std::uniform_int_distribution<std::size_t> pick(0, view.size() - 1);
    for (std::size_t i = 0; i < view.size(); ++i) sample.push_back(view[pick(rng_)]);
  }
  FStump s;
  s.stump = stump_fit(sample, feature, 1.0);
  s.birth = step_;
  return s;
}

void Orf3vLearner::top_up(FeatureId feature, Forest& forest) {
  while (forest.stumps.size() < static_cast<std::size_t>(params_.forest_size))
    forest.stumps.push_back(make_stump(feature));
}

Prediction Orf3vLearner::do_predict(const HaphazardInstance& inst) {
  double vote[2] = {0.0, 0.0};
  for (const auto& [id, value] : inst.x) {
    auto it = forests_.find(id);
    if (it == forests_.end()) continue;
    for (const auto& s : it->second.stumps) vote[s.stump.predict(value)] += s.stump.weight;
  }
  Prediction p;
  const double total = vote[0] + vote[1];
  if (vote[1] > vote[0]) {
    p.label = 1;
  } else if (vote[0] > vote[1]) {
    p.label = 0;
  } else {
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

void Orf3vLearner::do_update(const HaphazardInstance& inst) {
  // 1. Reweight and score the stumps of every observed feature.
  for (const auto& [id, value] : inst.x) {
    auto it = forests_.find(id);
    if (it == forests_.end()) continue;
    for (auto& s : it->second.stumps) {
      const bool correct = s.stump.predict(value) == inst.label;
      s.stump.weight *= correct ? (1.0 + params_.alpha) : (1.0 - params_.alpha);
      s.stump.weight = std::clamp(s.stump.weight, 0.01, 1.0);
      s.errs.push_back(correct ? 0 : 1);
      while (s.errs.size() > static_cast<std::size_t>(params_.windowsize)) s.errs.pop_front();
    }
  }

  buffer_.push(inst);
  ++label_count_[inst.label];
  ++step_;

  // 2. First sighting of a feature grows a full forest for it.
  for (const auto& [id, value] : inst.x) {
    if (forests_.count(id)) continue;
    Forest forest;
    top_up(id, forest);
    forests_.emplace(id, std::move(forest));
  }

  // 3. Periodic replacement keeps forests from fossilizing.
  if (step_ % params_.replacement_interval == 0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& [id, forest] : forests_) {
      if (forest.stumps.empty()) {
        top_up(id, forest);
        continue;
      }
      if (params_.update_strategy == "oldest") {
        std::size_t oldest = 0;
        for (std::size_t i = 1; i < forest.stumps.size(); ++i)
          if (forest.stumps[i].birth < forest.stumps[oldest].birth) oldest = i;
        forest.stumps.erase(forest.stumps.begin() + static_cast<std::ptrdiff_t>(oldest));
      } else {
        // With probability replacement_chance the forest is left alone.
        if (u(rng_) < params_.replacement_chance) {
          top_up(id, forest);
          continue;
        }
        std::uniform_int_distribution<std::size_t> pick(0, forest.stumps.size() - 1);
        forest.stumps.erase(forest.stumps.begin() + static_cast<std::ptrdiff_t>(pick(rng_)));
      }
      top_up(id, forest);
    }
  }

  // 4. Drop stumps whose rolling error sits provably above the forest mean.
  for (auto& [id, forest] : forests_) {
    if (forest.stumps.size() < 2) continue;
    double forest_err = 0.0;
    std::size_t forest_n = 0;
    for (const auto& s : forest.stumps)
      for (int e : s.errs) {
        forest_err += e;
        ++forest_n;
      }
    if (forest_n == 0) continue;
    forest_err /= static_cast<double>(forest_n);
    for (std::size_t i = 0; i < forest.stumps.size() && forest.stumps.size() > 1;) {
      const auto& errs = forest.stumps[i].errs;
      double own = 0.0;
      for (int e : errs) own += e;
      const std::size_t n = errs.size();
      if (n > 0 && own / static_cast<double>(n) - forest_err > error_gap_bound(params_.delta, n))
        forest.stumps.erase(forest.stumps.begin() + static_cast<std::ptrdiff_t>(i));
      else
        ++i;
    }
  }
}

}  // namespace haphazard
