#include "haphazard/learner.hpp"

#include <algorithm>
#include <cmath>

#include "haphazard/auxdrop.hpp"
#include "haphazard/dynfo.hpp"
#include "haphazard/error.hpp"
#include "haphazard/fae.hpp"
#include "haphazard/nb3.hpp"
#include "haphazard/ocds.hpp"
#include "haphazard/olvf.hpp"
#include "haphazard/orf3v.hpp"

namespace haphazard {

Prediction OnlineLearner::predict(const HaphazardInstance& inst) {
  if (phase_ == Phase::predicted)
    raise(Errc::ordering, "predict at t=" + std::to_string(inst.t) +
                              " before update of t=" + std::to_string(pending_t_));
  Prediction p = do_predict(inst);
  p.score = std::clamp(p.score, 0.0, 1.0);
  phase_ = Phase::predicted;
  pending_t_ = inst.t;
  started_ = true;
  return p;
}

void OnlineLearner::update(const HaphazardInstance& inst) {
  if (phase_ != Phase::predicted || pending_t_ != inst.t)
    raise(Errc::ordering, "update at t=" + std::to_string(inst.t) +
                              " without a preceding predict of the same instance");
  do_update(inst);
  phase_ = Phase::idle;
}

void OnlineLearner::pretrain(const HaphazardInstance& inst) {
  if (started_ || phase_ != Phase::idle)
    raise(Errc::ordering, "pretrain is only allowed before the first predict");
  do_update(inst);
}

namespace {

// Strict key checking: a typo in a grid file should fail loudly, not search a
// stale default.
void check_keys(const nlohmann::json& config, const std::vector<std::string>& allowed,
                const std::string& model) {
  if (config.is_null()) return;
  if (!config.is_object())
    raise(Errc::invalid_input, "config for " + model + " must be a JSON object");
  for (const auto& [key, value] : config.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      std::string known;
      for (const auto& k : allowed) known += (known.empty() ? "" : ", ") + k;
      raise(Errc::invalid_input,
            "unknown " + model + " hyperparameter \"" + key + "\" (known: " + known + ")");
    }
  }
}

double num(const nlohmann::json& c, const char* key, double fallback) {
  if (c.is_object() && c.contains(key)) return c.at(key).get<double>();
  return fallback;
}

int integer(const nlohmann::json& c, const char* key, int fallback) {
  if (c.is_object() && c.contains(key)) return c.at(key).get<int>();
  return fallback;
}

bool boolean(const nlohmann::json& c, const char* key, bool fallback) {
  if (c.is_object() && c.contains(key)) return c.at(key).get<bool>();
  return fallback;
}

}  // namespace

std::vector<std::string> known_models() {
  return {"nb3", "fae", "olvf", "ocds", "dynfo", "orf3v", "auxdrop"};
}

std::unique_ptr<OnlineLearner> make_learner(const std::string& model,
                                            const nlohmann::json& config, std::uint64_t seed) {
  if (model == "nb3") {
    check_keys(config, {"n"}, model);
    Nb3Params p;
    p.n_fraction = num(config, "n", p.n_fraction);
    return std::make_unique<Nb3Learner>(p);
  }
  if (model == "fae") {
    check_keys(config, {"m", "f", "p", "r", "N", "M"}, model);
    FaeParams p;
    p.m = integer(config, "m", p.m);
    p.f = num(config, "f", p.f);
    p.p = integer(config, "p", p.p);
    p.r = integer(config, "r", p.r);
    p.N = integer(config, "N", p.N);
    p.M = num(config, "M", p.M);
    return std::make_unique<FaeLearner>(p);
  }
  if (model == "olvf") {
    check_keys(config, {"C", "C_bar", "B", "lambda", "standardize"}, model);
    OlvfParams p;
    p.C = num(config, "C", p.C);
    p.C_bar = num(config, "C_bar", p.C_bar);
    p.B = num(config, "B", p.B);
    p.lambda = num(config, "lambda", p.lambda);
    p.standardize = boolean(config, "standardize", p.standardize);
    return std::make_unique<OlvfLearner>(p);
  }
  if (model == "ocds") {
    check_keys(config, {"T", "alpha", "beta0", "beta1", "beta2", "k", "decay", "standardize"},
               model);
    OcdsParams p;
    p.T = integer(config, "T", p.T);
    p.alpha = num(config, "alpha", p.alpha);
    p.beta0 = num(config, "beta0", p.beta0);
    p.beta1 = num(config, "beta1", p.beta1);
    p.beta2 = num(config, "beta2", p.beta2);
    if (config.is_object() && config.contains("k")) p.fixed_k = config.at("k").get<double>();
    p.decay = num(config, "decay", p.decay);
    p.standardize = boolean(config, "standardize", p.standardize);
    return std::make_unique<OcdsLearner>(p);
  }
  if (model == "dynfo") {
    check_keys(config, {"alpha", "beta", "delta", "epsilon", "gamma", "M", "N", "theta1", "theta2"},
               model);
    DynfoParams p;
    p.alpha = num(config, "alpha", p.alpha);
    p.beta = num(config, "beta", p.beta);
    p.delta = num(config, "delta", p.delta);
    p.epsilon = num(config, "epsilon", p.epsilon);
    p.gamma = num(config, "gamma", p.gamma);
    p.M = integer(config, "M", p.M);
    p.N = integer(config, "N", p.N);
    p.theta1 = num(config, "theta1", p.theta1);
    p.theta2 = num(config, "theta2", p.theta2);
    return std::make_unique<DynfoLearner>(p, seed);
  }
  if (model == "orf3v") {
    check_keys(config,
               {"forestSize", "replacementInterval", "updateStrategy", "replacementChance",
                "windowsize", "alpha", "delta"},
               model);
    Orf3vParams p;
    p.forest_size = integer(config, "forestSize", p.forest_size);
    p.replacement_interval = integer(config, "replacementInterval", p.replacement_interval);
    if (config.is_object() && config.contains("updateStrategy"))
      p.update_strategy = config.at("updateStrategy").get<std::string>();
    p.replacement_chance = num(config, "replacementChance", p.replacement_chance);
    p.windowsize = integer(config, "windowsize", p.windowsize);
    p.alpha = num(config, "alpha", p.alpha);
    p.delta = num(config, "delta", p.delta);
    return std::make_unique<Orf3vLearner>(p, seed);
  }
  if (model == "auxdrop") {
    check_keys(config,
               {"max_num_hidden_layers", "neuron_per_hidden_layer", "n_neuron_aux_layer", "b", "s",
                "lr", "dropout_p", "non_aux_nodes"},
               model);
    AuxdropParams p;
    p.max_num_hidden_layers = integer(config, "max_num_hidden_layers", p.max_num_hidden_layers);
    p.neuron_per_hidden_layer = integer(config, "neuron_per_hidden_layer", p.neuron_per_hidden_layer);
    p.n_neuron_aux_layer = integer(config, "n_neuron_aux_layer", p.n_neuron_aux_layer);
    p.b = num(config, "b", p.b);
    p.s = num(config, "s", p.s);
    p.lr = num(config, "lr", p.lr);
    p.dropout_p = num(config, "dropout_p", p.dropout_p);
    p.non_aux_nodes = integer(config, "non_aux_nodes", p.non_aux_nodes);
    return std::make_unique<AuxdropLearner>(p, seed);
  }
  std::string names;
  for (const auto& m : known_models()) names += (names.empty() ? "" : ", ") + m;
  raise(Errc::invalid_input, "unknown model \"" + model + "\" (known models: " + names + ")");
}

}  // namespace haphazard
