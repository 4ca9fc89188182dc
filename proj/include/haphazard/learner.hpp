#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "haphazard/feature_space.hpp"

namespace haphazard {

struct Prediction {
  int label = 0;      // 0 or 1
  double score = 0.5; // P(class 1), in [0,1]
};

// Online binary classifier over dimension-varying inputs. The public
// predict/update pair enforces the prequential discipline: every instance is
// predicted before its label is consumed, exactly once, in stream order.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  virtual std::string_view model_name() const = 0;
  virtual bool deterministic() const = 0;
  virtual bool needs_pretraining() const { return false; }
  virtual bool diverged() const { return false; }

  Prediction predict(const HaphazardInstance& inst);
  void update(const HaphazardInstance& inst);

  // Label-consuming warm start on one instance, allowed only before the first
  // predict. The instance is not scored.
  void pretrain(const HaphazardInstance& inst);

 protected:
  virtual Prediction do_predict(const HaphazardInstance& inst) = 0;
  virtual void do_update(const HaphazardInstance& inst) = 0;

 private:
  enum class Phase { idle, predicted };
  Phase phase_ = Phase::idle;
  std::int64_t pending_t_ = -1;
  bool started_ = false;
};

inline double logistic(double margin) { return 1.0 / (1.0 + std::exp(-margin)); }

std::vector<std::string> known_models();

// Throws invalid-input for unknown models or unknown/invalid config keys.
std::unique_ptr<OnlineLearner> make_learner(const std::string& model,
                                            const nlohmann::json& config, std::uint64_t seed);

}  // namespace haphazard
