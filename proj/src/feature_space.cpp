#include "haphazard/feature_space.hpp"

#include <algorithm>
#include <cmath>

#include "haphazard/error.hpp"

namespace haphazard {

FeatureId FeatureRegistry::intern(std::string_view name) {
  if (name.empty()) raise(Errc::invalid_input, "feature name must be non-empty");
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  FeatureId id = static_cast<FeatureId>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<FeatureId> FeatureRegistry::lookup(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& FeatureRegistry::name(FeatureId id) const {
  if (id >= names_.size()) raise(Errc::invalid_input, "unknown feature id");
  return names_[id];
}

std::optional<double> HaphazardInstance::value(FeatureId id) const {
  auto it = std::lower_bound(x.begin(), x.end(), id,
                             [](const auto& pair, FeatureId key) { return pair.first < key; });
  if (it == x.end() || it->first != id) return std::nullopt;
  return it->second;
}

HaphazardInstance make_instance(std::int64_t t, std::vector<std::pair<FeatureId, double>> x,
                                int label) {
  if (t < 0) raise(Errc::invalid_input, "instance time must be non-negative");
  if (label != 0 && label != 1) raise(Errc::invalid_input, "label must be 0 or 1");
  std::sort(x.begin(), x.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i].second))
      raise(Errc::invalid_input, "non-finite value for feature id " + std::to_string(x[i].first));
    if (i > 0 && x[i].first == x[i - 1].first)
      raise(Errc::invalid_input, "duplicate feature id " + std::to_string(x[i].first));
  }
  return HaphazardInstance{t, std::move(x), label};
}

void FeatureUniverse::absorb(const HaphazardInstance& inst) {
  if (inst.t < last_t_)
    raise(Errc::ordering, "universe absorb out of order: t=" + std::to_string(inst.t) +
                              " after t=" + std::to_string(last_t_));
  for (const auto& [id, value] : inst.x) {
    (void)value;
    if (id >= records_.size()) records_.resize(id + 1);
    FeatureRecord& rec = records_[id];
    if (rec.observation_count == 0) {
      rec.first_seen = inst.t;
      ++total_known_;
    }
    rec.last_seen = inst.t;
    ++rec.observation_count;
  }
  last_t_ = inst.t;
}

bool FeatureUniverse::known(FeatureId id) const {
  return id < records_.size() && records_[id].observation_count > 0;
}

const FeatureRecord* FeatureUniverse::record(FeatureId id) const {
  if (!known(id)) return nullptr;
  return &records_[id];
}

std::vector<FeatureId> FeatureUniverse::known_ids() const {
  std::vector<FeatureId> ids;
  ids.reserve(total_known_);
  for (FeatureId id = 0; id < records_.size(); ++id)
    if (records_[id].observation_count > 0) ids.push_back(id);
  return ids;
}

FeatureDisposition classify_features(const HaphazardInstance& inst,
                                     const FeatureUniverse& universe) {
  FeatureDisposition out;
  for (const auto& [id, value] : inst.x) {
    (void)value;
    (universe.known(id) ? out.previously_seen : out.sudden).push_back(id);
  }
  return out;
}

}  // namespace haphazard
