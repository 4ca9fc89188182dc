#include "haphazard/olvf.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "haphazard/error.hpp"

namespace haphazard {

OlvfLearner::OlvfLearner(const OlvfParams& params) : params_(params) {
  if (params.C < 0 || params.C_bar < 0 || params.lambda < 0 || params.lambda >= 1)
    raise(Errc::invalid_input, "olvf C, C_bar must be >= 0 and lambda in [0,1)");
  if (!(params.B > 0.0 && params.B <= 1.0))
    raise(Errc::invalid_input, "olvf B must be in (0,1]");
}

double OlvfLearner::shared_margin(const HaphazardInstance& inst) const {
  double margin = 0.0;
  for (const auto& [id, value] : inst.x) {
    auto it = w_.find(id);
    if (it != w_.end()) margin += it->second * value;
  }
  return margin;
}

std::size_t OlvfLearner::nonzero_weight_count() const {
  std::size_t n = 0;
  for (const auto& [id, v] : w_) {
    (void)id;
    if (v != 0.0) ++n;
  }
  return n;
}

Prediction OlvfLearner::do_predict(const HaphazardInstance& inst) {
  HaphazardInstance local = inst;
  if (params_.standardize) {
    scaler_.absorb(inst);
    local = scaler_.transform(inst);
  }
  const double margin = shared_margin(local);
  return {margin > 0.0 ? 1 : 0, logistic(margin)};
}

void OlvfLearner::do_update(const HaphazardInstance& inst) {
  const HaphazardInstance local = params_.standardize ? scaler_.transform(inst) : inst;
  const double y = local.label == 1 ? 1.0 : -1.0;
  const double margin = shared_margin(local);
  const int predicted = margin > 0.0 ? 1 : 0;

  // Feature-space classifier over the existing/shared/new indicator
  // projections. Its loss log(e^{-I*<w,R>}) = -I*<w,R> vanishes at the zero
  // margin, so from zero initialization tau_bar stays 0 and these weights
  // remain exactly 0 forever.
  std::vector<FeatureId> shared, fresh;
  for (const auto& [id, value] : local.x) {
    (void)value;
    (w_.count(id) ? shared : fresh).push_back(id);
  }
  {
    const double agreement = predicted == local.label ? 1.0 : -1.0;
    double indicator_margin = 0.0;
    for (const auto& [id, wv] : wbar_) {
      (void)id;
      indicator_margin += wv;  // existing + shared partitions, indicator 1 each
    }
    double norm2 = static_cast<double>(wbar_.size() + fresh.size());
    for (FeatureId id : fresh)
      if (wbar_.count(id)) norm2 -= 1.0;  // unreachable from zero init; keeps norms exact
    const double fs_loss = -agreement * indicator_margin;
    const double tau_bar =
        norm2 > 0.0 ? std::min(params_.C_bar, std::max(0.0, fs_loss) / norm2) : 0.0;
    for (auto& [id, wv] : wbar_) {
      (void)id;
      wv += tau_bar * agreement;
    }
    for (FeatureId id : fresh) wbar_[id] = tau_bar * agreement;
  }

  // Instance classifier: PA-I step over shared+new, scaled by the
  // feature-space classifier's confidence (sigmoid of its margin, 0.5 while
  // it is identically zero). Passive steps leave the weights untouched.
  const double hinge = std::max(0.0, 1.0 - y * margin);
  if (hinge > 0.0 && params_.C > 0.0) {
    double norm2 = 0.0;
    for (const auto& [id, value] : local.x) norm2 += value * value;
    if (norm2 > 0.0) {
      double fs_margin = 0.0;
      for (const auto& [id, wv] : wbar_) {
        (void)id;
        fs_margin += wv;
      }
      const double tau = std::min(params_.C, hinge / norm2) * logistic(fs_margin);
      for (auto& [id, wv] : w_) {
        (void)id;
        wv *= (1.0 - params_.lambda);
      }
      for (const auto& [id, value] : local.x) w_[id] += tau * y * value;
      // Sparsity truncation: keep the ceil(B * dim) largest magnitudes.
      const std::size_t dim = w_.size();
      const std::size_t keep =
          static_cast<std::size_t>(std::ceil(params_.B * static_cast<double>(dim)));
      if (keep < dim) {
        std::vector<std::pair<double, FeatureId>> mags;
        mags.reserve(dim);
        for (const auto& [id, wv] : w_) mags.emplace_back(std::abs(wv), id);
        std::sort(mags.begin(), mags.end(), [](const auto& a, const auto& b) {
          if (a.first != b.first) return a.first > b.first;
          return a.second < b.second;
        });
        for (std::size_t i = keep; i < mags.size(); ++i) w_[mags[i].second] = 0.0;
      }
    }
  }
  // New features always enter the tracked space, at zero on passive steps.
  for (FeatureId id : fresh) w_.try_emplace(id, 0.0);
}

}  // namespace haphazard
