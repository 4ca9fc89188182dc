#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "haphazard/dataset.hpp"
#include "haphazard/feature_space.hpp"

namespace haphazard {

struct MaskConfig {
  double p = 1.0;          // per-cell availability probability, in [0,1]
  std::uint64_t seed = 0;
};

struct HaphazardStream {
  std::vector<HaphazardInstance> instances;
  std::vector<std::string> feature_names;  // may be empty for id-only sources
};

// Presence equals non-missingness; no draws consumed.
HaphazardStream stream_from_dataset(const Dataset& ds);

// Independent per-cell draws in row-major (row, then column) order; every cell
// consumes exactly one draw, including cells that are already missing, so the
// seed + order discipline is a stable external contract. A cell survives iff
// u < p with u uniform in [0,1). Already-missing cells stay missing.
HaphazardStream mask_stream(const Dataset& ds, const MaskConfig& cfg);

// Same draw discipline over an existing stream: one draw per present pair, in
// instance order, pairs in id order.
HaphazardStream mask_stream(const HaphazardStream& stream, const MaskConfig& cfg);

// JSON-lines form: {"t":int,"x":{"id":value,...},"y":0|1} per line.
void write_jsonl(const HaphazardStream& stream, std::ostream& out);
void write_jsonl_file(const HaphazardStream& stream, const std::string& path);
HaphazardStream read_jsonl(std::istream& in);
HaphazardStream read_jsonl_file(const std::string& path);

}  // namespace haphazard
