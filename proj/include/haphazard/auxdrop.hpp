#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "haphazard/learner.hpp"

namespace haphazard {

struct AuxdropParams {
  int max_num_hidden_layers = 6;      // hidden depth, each with its own head
  int neuron_per_hidden_layer = 50;   // width of layers 2..L
  int n_neuron_aux_layer = 100;       // width of the first (feature) layer
  double b = 0.99;                    // head-weight discount per unit loss
  double s = 0.2;                     // smoothing mass spread across heads
  double lr = 0.05;                   // SGD step
  double dropout_p = 0.3;             // target dropped fraction in the first layer
  int non_aux_nodes = 0;              // first-layer nodes fed a constant input
};

// Pre-made dropout decision for one instance; stored so that update can
// replay exactly the forward pass that produced the prediction.
struct DropMask {
  std::vector<char> dropped;  // one flag per first-layer node
  std::size_t forced = 0;     // nodes dropped for structural reasons
  double scale = 1.0;         // inverted-dropout rescale for surviving nodes
};

// Hedged multi-head MLP whose first layer assigns one neuron per feature.
// Features appearing mid-stream claim unassigned first-layer nodes with
// zeroed outgoing weights, so growth never changes the current function.
// Unobserved features force their node to drop; a random top-up brings the
// dropped fraction of the first layer to dropout_p.
class AuxdropLearner final : public OnlineLearner {
 public:
  AuxdropLearner(const AuxdropParams& params, std::uint64_t seed);

  std::string_view model_name() const override { return "auxdrop"; }
  bool deterministic() const override { return false; }
  bool diverged() const override { return diverged_; }

  std::size_t aux_node_count() const { return assigned_.size(); }
  const std::vector<double>& hedge_weights() const { return alpha_; }

  // Assigns nodes for new features and draws this instance's dropout mask.
  // Advances the RNG; predict uses it once and caches the result.
  DropMask make_mask(const HaphazardInstance& inst);

  // Hedge-weighted sum of per-head losses under a fixed mask. Pure.
  double loss(const HaphazardInstance& inst, const DropMask& mask) const;

  // Flat views over every trainable parameter, in one fixed order; the
  // analytic gradient vector is index-aligned with parameter_view.
  std::vector<double*> parameter_view();
  std::vector<double> gradients(const HaphazardInstance& inst, const DropMask& mask) const;

 protected:
  Prediction do_predict(const HaphazardInstance& inst) override;
  void do_update(const HaphazardInstance& inst) override;

 private:
  struct Forward {
    std::vector<std::vector<double>> z;  // pre-activations per layer
    std::vector<std::vector<double>> h;  // post-activation (and mask) per layer
    std::vector<double> logit;           // per-head
    std::vector<double> p;               // per-head sigmoid, clamped for loss
  };

  Forward forward(const HaphazardInstance& inst, const DropMask& mask) const;
  double node_input(std::size_t node, const HaphazardInstance& inst) const;
  void grow(const HaphazardInstance& inst);

  AuxdropParams params_;
  std::mt19937_64 rng_;

  // First layer: one scalar weight and bias per node. assigned_[j] is the
  // feature owning node j; nodes < non_aux_nodes take constant input 1.
  std::vector<double> aux_w_, aux_b_;
  std::vector<std::int64_t> assigned_;      // -1 = pool (unassigned)
  std::vector<std::size_t> node_of_;        // feature id -> node, or npos
  std::size_t next_pool_ = 0;

  std::vector<std::vector<double>> w_, b_;  // layers 2..L, row-major, width x prev
  std::vector<std::vector<double>> head_w_;
  std::vector<double> head_b_;
  std::vector<double> alpha_;               // head weights on the simplex

  FeatureUniverse universe_;
  DropMask cached_mask_;
  bool diverged_ = false;

  static constexpr std::size_t kNoNode = static_cast<std::size_t>(-1);
};

}  // namespace haphazard
