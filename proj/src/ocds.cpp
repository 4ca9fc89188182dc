#include "haphazard/ocds.hpp"

#include <cmath>

#include "haphazard/error.hpp"

namespace haphazard {
namespace {
constexpr double kDivergenceBound = 1e100;
}

OcdsLearner::OcdsLearner(const OcdsParams& params) : params_(params) {
  if (params.T < 1) raise(Errc::invalid_input, "ocds T must be >= 1");
  if (params.alpha < 0 || params.beta0 < 0 || params.beta1 < 0 || params.beta2 < 0)
    raise(Errc::invalid_input, "ocds scales must be non-negative");
  if (!(params.decay > 0.0 && params.decay <= 1.0))
    raise(Errc::invalid_input, "ocds decay must be in (0,1]");
  if (params.fixed_k && !(*params.fixed_k >= 0.0 && *params.fixed_k <= 1.0))
    raise(Errc::invalid_input, "ocds k must be in [0,1]");
  if (params.fixed_k) k_ = *params.fixed_k;
}

double OcdsLearner::comoment_now(FeatureId a, FeatureId b) const {
  const FeatureId lo = a < b ? a : b, hi = a < b ? b : a;
  auto row = s_.find(lo);
  if (row == s_.end()) return 0.0;
  auto it = row->second.find(hi);
  if (it == row->second.end()) return 0.0;
  return it->second.value * std::pow(params_.decay, static_cast<double>(step_ - it->second.at));
}

double OcdsLearner::row_abs_sum(FeatureId a) const {
  double sum = 0.0;
  auto row = s_.find(a);
  if (row != s_.end())
    for (const auto& [b, cm] : row->second) {
      (void)b;
      sum += std::abs(cm.value * std::pow(params_.decay, static_cast<double>(step_ - cm.at)));
    }
  for (const auto& [lo, cols] : s_) {
    if (lo >= a) break;
    auto it = cols.find(a);
    if (it != cols.end())
      sum += std::abs(it->second.value *
                      std::pow(params_.decay, static_cast<double>(step_ - it->second.at)));
  }
  return sum;
}

double OcdsLearner::ghat(FeatureId a, FeatureId b) const {
  const double row = row_abs_sum(a);
  if (row <= 0.0) return 0.0;
  return comoment_now(a, b) / row;
}

std::map<FeatureId, double> OcdsLearner::reconstruct(const HaphazardInstance& inst) const {
  const HaphazardInstance local = params_.standardize ? scaler_.transform(inst) : inst;
  std::map<FeatureId, double> out;
  for (const auto& [u, wv] : w_) {
    (void)wv;
    if (local.observes(u)) continue;
    double value = 0.0;
    for (const auto& [o, xo] : local.x) value += ghat(u, o) * xo;
    out[u] = value;
  }
  return out;
}

void OcdsLearner::flag_if_nonfinite(double v) {
  if (!std::isfinite(v) || std::abs(v) > kDivergenceBound) diverged_ = true;
}

Prediction OcdsLearner::do_predict(const HaphazardInstance& inst) {
  HaphazardInstance local = inst;
  if (params_.standardize) {
    scaler_.absorb(inst);
    local = scaler_.transform(inst);
  }
  double margin_w = 0.0;
  for (const auto& [id, value] : local.x) {
    auto it = w_.find(id);
    if (it != w_.end()) margin_w += it->second * value;
  }
  double margin_wt = 0.0;
  for (const auto& [u, xr] : reconstruct(inst)) {
    auto it = wt_.find(u);
    if (it != wt_.end()) margin_wt += it->second * xr;
  }
  const double margin = k_ * margin_w + (1.0 - k_) * margin_wt;
  if (!std::isfinite(margin)) {
    diverged_ = true;
    return {0, 0.5};
  }
  return {margin > 0.0 ? 1 : 0, logistic(margin)};
}

void OcdsLearner::do_update(const HaphazardInstance& inst) {
  if (diverged_) return;
  const HaphazardInstance local = params_.standardize ? scaler_.transform(inst) : inst;
  const double y = local.label == 1 ? 1.0 : -1.0;
  const auto recon = reconstruct(inst);

  // Sub-predictor scoreboard feeding the k re-estimation.
  {
    double margin_w = 0.0;
    for (const auto& [id, value] : local.x) {
      auto it = w_.find(id);
      if (it != w_.end()) margin_w += it->second * value;
    }
    double margin_wt = 0.0;
    for (const auto& [u, xr] : recon) {
      auto it = wt_.find(u);
      if (it != wt_.end()) margin_wt += it->second * xr;
    }
    if ((margin_w > 0.0 ? 1 : 0) == local.label) ++correct_w_;
    if ((margin_wt > 0.0 ? 1 : 0) == local.label) ++correct_wt_;
  }

  for (const auto& [id, value] : local.x) {
    (void)value;
    w_.try_emplace(id, 0.0);
  }

  // psi: observed coordinates carry x, unobserved carry the reconstruction.
  std::map<FeatureId, double> psi;
  for (const auto& [id, wv] : w_) {
    (void)wv;
    auto v = local.value(id);
    if (v) {
      psi[id] = *v;
    } else {
      auto it = recon.find(id);
      psi[id] = it != recon.end() ? it->second : 0.0;
    }
  }
  double wpsi = 0.0;
  for (const auto& [id, p] : psi) wpsi += w_[id] * p;
  const double err = y - wpsi;

  // Graph-smoothness term (L + L^T)w with L the unnormalized Laplacian of
  // |Ghat|; row sums of |Ghat| are 1 (or 0 for isolated features).
  std::map<FeatureId, double> smooth;
  if (params_.beta2 > 0.0) {
    for (const auto& [f, wf] : w_) {
      const double df = row_abs_sum(f) > 0.0 ? 1.0 : 0.0;
      double acc = 2.0 * (df - std::abs(ghat(f, f))) * wf;
      for (const auto& [g, wg] : w_) {
        if (g == f) continue;
        acc -= (std::abs(ghat(f, g)) + std::abs(ghat(g, f))) * wg;
      }
      smooth[f] = acc;
    }
  }

  for (auto& [f, wf] : w_) {
    const double sg = wf > 0.0 ? 1.0 : (wf < 0.0 ? -1.0 : 0.0);
    const double graph = params_.beta2 > 0.0 ? smooth[f] : 0.0;
    wf -= params_.beta0 * (-2.0 * err * psi[f]) + params_.beta1 * sg + params_.beta2 * graph;
    flag_if_nonfinite(wf);
  }

  // Reconstructed-space head: plain LMS over the reconstructed coordinates.
  double wtxr = 0.0;
  for (const auto& [u, xr] : recon) {
    wt_.try_emplace(u, 0.0);
    wtxr += wt_[u] * xr;
  }
  const double err2 = y - wtxr;
  for (const auto& [u, xr] : recon) {
    wt_[u] += 2.0 * params_.alpha * err2 * xr;
    flag_if_nonfinite(wt_[u]);
  }

  // Decayed co-moment absorption for the observed pairs.
  ++step_;
  for (const auto& [i, xi] : local.x)
    for (const auto& [j, xj] : local.x) {
      if (i > j) continue;
      CoMoment& cm = s_[i][j];
      cm.value = cm.value * std::pow(params_.decay, static_cast<double>(step_ - cm.at)) + xi * xj;
      cm.at = step_;
    }

  if (!params_.fixed_k && step_ % params_.T == 0) {
    k_ = (static_cast<double>(correct_w_) + 1.0) /
         (static_cast<double>(correct_w_ + correct_wt_) + 2.0);
    correct_w_ = correct_wt_ = 0;
  }
}

}  // namespace haphazard
