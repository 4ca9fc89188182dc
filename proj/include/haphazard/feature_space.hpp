#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace haphazard {

// Dense non-negative identifier interned from a feature name.
using FeatureId = std::uint32_t;

// Bidirectional name <-> id map. Interning is injective and ids are assigned
// densely in first-sight order.
class FeatureRegistry {
 public:
  FeatureId intern(std::string_view name);
  std::optional<FeatureId> lookup(std::string_view name) const;
  const std::string& name(FeatureId id) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::unordered_map<std::string, FeatureId> ids_;
  std::vector<std::string> names_;
};

// One observation X_t: a sparse set of (feature, value) pairs plus a binary
// label. Pairs are kept sorted by id and may be empty (fully missing row).
struct HaphazardInstance {
  std::int64_t t = 0;
  std::vector<std::pair<FeatureId, double>> x;  // sorted by id, ids unique, values finite
  int label = 0;                                // 0 or 1

  std::optional<double> value(FeatureId id) const;
  bool observes(FeatureId id) const { return value(id).has_value(); }
};

// Validates, sorts and deduplicate-checks the pair list.
HaphazardInstance make_instance(std::int64_t t, std::vector<std::pair<FeatureId, double>> x,
                                int label);

struct FeatureRecord {
  std::int64_t first_seen = 0;
  std::int64_t last_seen = 0;
  std::uint64_t observation_count = 0;
};

// Running record of every feature ever observed. Features are never removed:
// obsolescence is only derivable from last_seen.
class FeatureUniverse {
 public:
  // Requires non-decreasing t across calls; ordering error otherwise.
  void absorb(const HaphazardInstance& inst);

  bool known(FeatureId id) const;
  const FeatureRecord* record(FeatureId id) const;  // nullptr when unknown
  std::size_t total_known() const { return total_known_; }
  std::int64_t last_t() const { return last_t_; }   // -1 before the first absorb
  std::vector<FeatureId> known_ids() const;

 private:
  std::vector<FeatureRecord> records_;  // indexed by id; count==0 means unseen
  std::size_t total_known_ = 0;
  std::int64_t last_t_ = -1;
};

struct FeatureDisposition {
  std::vector<FeatureId> sudden;          // observed now, never seen before
  std::vector<FeatureId> previously_seen; // observed now, already in the universe
};

// Partitions the instance's observed ids against a universe reflecting the
// stream strictly before inst.t. Does not mutate the universe.
FeatureDisposition classify_features(const HaphazardInstance& inst, const FeatureUniverse& universe);

}  // namespace haphazard
