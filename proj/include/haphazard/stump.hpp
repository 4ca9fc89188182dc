#pragma once

#include <deque>
#include <vector>

#include "haphazard/feature_space.hpp"

namespace haphazard {

enum class Polarity { plus, minus };

// One-level threshold rule on a single feature. Votes only when its feature
// is observed.
struct DecisionStump {
  FeatureId split_feature = 0;
  double threshold = 0.0;
  Polarity polarity = Polarity::plus;
  double weight = 1.0;

  // plus: predict 1 iff x >= threshold; minus: predict 1 iff x < threshold.
  int predict(double x) const {
    const bool ge = x >= threshold;
    return (polarity == Polarity::plus) == ge ? 1 : 0;
  }
};

// FIFO ring of the most recent labeled instances, capacity fixed at creation.
class InstanceBuffer {
 public:
  explicit InstanceBuffer(std::size_t cap = 20) : cap_(cap) {}

  void push(const HaphazardInstance& inst) {
    buf_.push_back(inst);
    while (buf_.size() > cap_) buf_.pop_front();
  }
  std::size_t size() const { return buf_.size(); }
  std::size_t capacity() const { return cap_; }
  const HaphazardInstance& at(std::size_t i) const { return buf_[i]; }

  std::vector<const HaphazardInstance*> view() const {
    std::vector<const HaphazardInstance*> out;
    out.reserve(buf_.size());
    for (const auto& inst : buf_) out.push_back(&inst);
    return out;
  }

 private:
  std::size_t cap_;
  std::deque<HaphazardInstance> buf_;
};

// Best threshold/polarity by balanced accuracy over the instances that
// observe the feature; candidates are midpoints of consecutive sorted
// distinct values. Ties prefer the smallest threshold, then plus polarity.
// With fewer than two observing instances or a single label the result is a
// degenerate majority stump (threshold at -inf or +inf, polarity plus).
// quality, when requested, is the achieved balanced accuracy (majority
// accuracy over observing instances for degenerate fits, 0 when nothing
// observes the feature).
DecisionStump stump_fit(const std::vector<const HaphazardInstance*>& instances, FeatureId feature,
                        double init_weight = 1.0, double* quality = nullptr);

DecisionStump stump_fit(const InstanceBuffer& buffer, FeatureId feature, double init_weight = 1.0,
                        double* quality = nullptr);

}  // namespace haphazard
