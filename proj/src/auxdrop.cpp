#include "haphazard/auxdrop.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "haphazard/error.hpp"

namespace haphazard {
namespace {

constexpr double kProbFloor = 1e-7;

double relu(double z) { return z > 0.0 ? z : 0.0; }
double relu_grad(double z) { return z > 0.0 ? 1.0 : 0.0; }

double bce(double p, int y) {
  const double pc = std::clamp(p, kProbFloor, 1.0 - kProbFloor);
  return y == 1 ? -std::log(pc) : -std::log(1.0 - pc);
}

// The clamp in bce makes the loss locally flat once p leaves the floor band.
double bce_logit_grad(double p, int y) {
  if (p < kProbFloor || p > 1.0 - kProbFloor) return 0.0;
  return p - static_cast<double>(y);
}

}  // namespace

AuxdropLearner::AuxdropLearner(const AuxdropParams& params, std::uint64_t seed)
    : params_(params), rng_(seed) {
  if (params.max_num_hidden_layers < 1)
    raise(Errc::invalid_input, "auxdrop max_num_hidden_layers must be >= 1");
  if (params.neuron_per_hidden_layer < 1)
    raise(Errc::invalid_input, "auxdrop neuron_per_hidden_layer must be >= 1");
  if (params.n_neuron_aux_layer < 1)
    raise(Errc::invalid_input, "auxdrop n_neuron_aux_layer must be >= 1");
  if (!(params.b > 0.0 && params.b <= 1.0))
    raise(Errc::invalid_input, "auxdrop b must be in (0,1]");
  if (!(params.s >= 0.0 && params.s <= 1.0))
    raise(Errc::invalid_input, "auxdrop s must be in [0,1]");
  if (!(params.lr >= 0.0)) raise(Errc::invalid_input, "auxdrop lr must be non-negative");
  if (!(params.dropout_p >= 0.0 && params.dropout_p < 1.0))
    raise(Errc::invalid_input, "auxdrop dropout_p must be in [0,1)");
  if (params.non_aux_nodes < 0 || params.non_aux_nodes > params.n_neuron_aux_layer)
    raise(Errc::invalid_input, "auxdrop non_aux_nodes must be in [0, n_neuron_aux_layer]");

  const std::size_t na = static_cast<std::size_t>(params.n_neuron_aux_layer);
  const std::size_t n = static_cast<std::size_t>(params.neuron_per_hidden_layer);
  const std::size_t layers = static_cast<std::size_t>(params.max_num_hidden_layers);

  aux_w_.assign(na, 0.0);
  aux_b_.assign(na, 0.01);
  assigned_.assign(na, -1);
  next_pool_ = static_cast<std::size_t>(params.non_aux_nodes);

  std::normal_distribution<double> input_init(0.0, 0.5);
  for (std::size_t j = 0; j < next_pool_; ++j) aux_w_[j] = input_init(rng_);

  // Pool columns start at zero so claiming a node cannot move the output.
  for (std::size_t l = 1; l < layers; ++l) {
    const std::size_t prev = l == 1 ? na : n;
    std::normal_distribution<double> he(0.0, std::sqrt(2.0 / static_cast<double>(prev)));
    std::vector<double> w(n * prev, 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < prev; ++c)
        if (l != 1 || c < next_pool_) w[r * prev + c] = he(rng_);
    w_.push_back(std::move(w));
    b_.push_back(std::vector<double>(n, 0.01));
  }

  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t width = l == 0 ? na : n;
    std::normal_distribution<double> he(0.0, std::sqrt(2.0 / static_cast<double>(width)));
    std::vector<double> hw(width, 0.0);
    for (std::size_t c = 0; c < width; ++c)
      if (l != 0 || c < next_pool_) hw[c] = he(rng_);
    head_w_.push_back(std::move(hw));
    head_b_.push_back(0.0);
  }
  alpha_.assign(layers, 1.0 / static_cast<double>(layers));
}

double AuxdropLearner::node_input(std::size_t node, const HaphazardInstance& inst) const {
  if (node < static_cast<std::size_t>(params_.non_aux_nodes)) return 1.0;
  const std::int64_t fid = assigned_[node];
  if (fid < 0) return 0.0;
  auto v = inst.value(static_cast<FeatureId>(fid));
  return v ? *v : 0.0;
}

void AuxdropLearner::grow(const HaphazardInstance& inst) {
  const FeatureDisposition disposition = classify_features(inst, universe_);
  universe_.absorb(inst);
  for (FeatureId fid : disposition.sudden) {
    if (next_pool_ >= aux_w_.size())
      raise(Errc::capacity,
            "auxdrop: no free first-layer node for feature id " + std::to_string(fid) +
                "; raise n_neuron_aux_layer");
    const std::size_t node = next_pool_++;
    assigned_[node] = static_cast<std::int64_t>(fid);
    if (node_of_.size() <= fid) node_of_.resize(fid + 1, kNoNode);
    node_of_[fid] = node;
    std::normal_distribution<double> input_init(0.0, 0.5);
    aux_w_[node] = input_init(rng_);
  }
}

DropMask AuxdropLearner::make_mask(const HaphazardInstance& inst) {
  grow(inst);
  const std::size_t na = aux_w_.size();
  DropMask mask;
  mask.dropped.assign(na, 0);
  for (std::size_t j = static_cast<std::size_t>(params_.non_aux_nodes); j < na; ++j) {
    const std::int64_t fid = assigned_[j];
    if (fid < 0 || !inst.observes(static_cast<FeatureId>(fid))) {
      mask.dropped[j] = 1;
      ++mask.forced;
    }
  }
  const std::size_t target = static_cast<std::size_t>(
      std::ceil(params_.dropout_p * static_cast<double>(na)));
  if (target > mask.forced) {
    std::vector<std::size_t> candidates;
    candidates.reserve(na - mask.forced);
    for (std::size_t j = 0; j < na; ++j)
      if (!mask.dropped[j]) candidates.push_back(j);
    std::size_t extras = std::min(target - mask.forced, candidates.size());
    for (std::size_t i = 0; i < extras; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
      std::swap(candidates[i], candidates[pick(rng_)]);
      mask.dropped[candidates[i]] = 1;
    }
  }
  std::size_t total = 0;
  for (char d : mask.dropped) total += d;
  mask.scale = total >= na ? 1.0
                           : static_cast<double>(na) / static_cast<double>(na - total);
  return mask;
}

AuxdropLearner::Forward AuxdropLearner::forward(const HaphazardInstance& inst,
                                                const DropMask& mask) const {
  const std::size_t na = aux_w_.size();
  const std::size_t n = static_cast<std::size_t>(params_.neuron_per_hidden_layer);
  const std::size_t layers = alpha_.size();

  Forward f;
  f.z.resize(layers);
  f.h.resize(layers);
  f.z[0].assign(na, 0.0);
  f.h[0].assign(na, 0.0);
  for (std::size_t j = 0; j < na; ++j) {
    if (mask.dropped[j]) continue;
    f.z[0][j] = aux_w_[j] * node_input(j, inst) + aux_b_[j];
    f.h[0][j] = relu(f.z[0][j]) * mask.scale;
  }
  for (std::size_t l = 1; l < layers; ++l) {
    const std::vector<double>& prev = f.h[l - 1];
    f.z[l].assign(n, 0.0);
    f.h[l].assign(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      double acc = b_[l - 1][r];
      const double* row = &w_[l - 1][r * prev.size()];
      for (std::size_t c = 0; c < prev.size(); ++c) acc += row[c] * prev[c];
      f.z[l][r] = acc;
      f.h[l][r] = relu(acc);
    }
  }
  f.logit.resize(layers);
  f.p.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    double acc = head_b_[l];
    for (std::size_t c = 0; c < f.h[l].size(); ++c) acc += head_w_[l][c] * f.h[l][c];
    f.logit[l] = acc;
    f.p[l] = logistic(acc);
  }
  return f;
}

double AuxdropLearner::loss(const HaphazardInstance& inst, const DropMask& mask) const {
  const Forward f = forward(inst, mask);
  double total = 0.0;
  for (std::size_t l = 0; l < alpha_.size(); ++l) total += alpha_[l] * bce(f.p[l], inst.label);
  return total;
}

std::vector<double*> AuxdropLearner::parameter_view() {
  std::vector<double*> out;
  for (double& v : aux_w_) out.push_back(&v);
  for (double& v : aux_b_) out.push_back(&v);
  for (std::size_t l = 0; l < w_.size(); ++l) {
    for (double& v : w_[l]) out.push_back(&v);
    for (double& v : b_[l]) out.push_back(&v);
  }
  for (std::size_t l = 0; l < head_w_.size(); ++l) {
    for (double& v : head_w_[l]) out.push_back(&v);
    out.push_back(&head_b_[l]);
  }
  return out;
}

std::vector<double> AuxdropLearner::gradients(const HaphazardInstance& inst,
                                              const DropMask& mask) const {
  const Forward f = forward(inst, mask);
  const std::size_t layers = alpha_.size();
  const int y = inst.label;

  std::vector<double> ghead(layers);
  for (std::size_t l = 0; l < layers; ++l) ghead[l] = alpha_[l] * bce_logit_grad(f.p[l], y);

  // dh[l] accumulates head and upper-layer contributions; dz gates on relu.
  std::vector<std::vector<double>> dh(layers), dz(layers);
  for (std::size_t l = 0; l < layers; ++l) dh[l].assign(f.h[l].size(), 0.0);
  for (std::size_t li = layers; li-- > 0;) {
    for (std::size_t c = 0; c < f.h[li].size(); ++c) dh[li][c] += ghead[li] * head_w_[li][c];
    dz[li].assign(f.z[li].size(), 0.0);
    if (li == 0) {
      for (std::size_t j = 0; j < f.z[0].size(); ++j)
        if (!mask.dropped[j]) dz[0][j] = dh[0][j] * mask.scale * relu_grad(f.z[0][j]);
    } else {
      for (std::size_t r = 0; r < f.z[li].size(); ++r)
        dz[li][r] = dh[li][r] * relu_grad(f.z[li][r]);
      const std::size_t prev_width = f.h[li - 1].size();
      const std::vector<double>& w = w_[li - 1];
      for (std::size_t r = 0; r < f.z[li].size(); ++r) {
        const double d = dz[li][r];
        if (d == 0.0) continue;
        const double* row = &w[r * prev_width];
        for (std::size_t c = 0; c < prev_width; ++c) dh[li - 1][c] += d * row[c];
      }
    }
  }

  std::vector<double> g;
  for (std::size_t j = 0; j < aux_w_.size(); ++j) g.push_back(dz[0][j] * node_input(j, inst));
  for (std::size_t j = 0; j < aux_b_.size(); ++j) g.push_back(dz[0][j]);
  for (std::size_t l = 1; l < layers; ++l) {
    const std::size_t prev_width = f.h[l - 1].size();
    for (std::size_t r = 0; r < f.z[l].size(); ++r)
      for (std::size_t c = 0; c < prev_width; ++c) g.push_back(dz[l][r] * f.h[l - 1][c]);
    for (std::size_t r = 0; r < f.z[l].size(); ++r) g.push_back(dz[l][r]);
  }
  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t c = 0; c < f.h[l].size(); ++c) g.push_back(ghead[l] * f.h[l][c]);
    g.push_back(ghead[l]);
  }
  return g;
}

Prediction AuxdropLearner::do_predict(const HaphazardInstance& inst) {
  if (diverged_) return {0, 0.5};
  cached_mask_ = make_mask(inst);
  const Forward f = forward(inst, cached_mask_);
  double score = 0.0;
  for (std::size_t l = 0; l < alpha_.size(); ++l) score += alpha_[l] * f.p[l];
  if (!std::isfinite(score)) {
    diverged_ = true;
    return {0, 0.5};
  }
  return {score > 0.5 ? 1 : 0, score};
}

void AuxdropLearner::do_update(const HaphazardInstance& inst) {
  if (diverged_) return;
  const Forward f = forward(inst, cached_mask_);
  const std::vector<double> g = gradients(inst, cached_mask_);
  for (double v : g)
    if (!std::isfinite(v)) {
      diverged_ = true;
      return;
    }
  const std::vector<double*> params = parameter_view();
  for (std::size_t i = 0; i < params.size(); ++i) *params[i] -= params_.lr * g[i];

  double sum = 0.0;
  for (std::size_t l = 0; l < alpha_.size(); ++l) {
    alpha_[l] *= std::pow(params_.b, bce(f.p[l], inst.label));
    sum += alpha_[l];
  }
  const std::size_t layers = alpha_.size();
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    alpha_.assign(layers, 1.0 / static_cast<double>(layers));
  } else {
    for (double& a : alpha_) a /= sum;
  }
  const double floor_mix = params_.s / static_cast<double>(layers);
  for (double& a : alpha_) a = (1.0 - params_.s) * a + floor_mix;
}

}  // namespace haphazard
