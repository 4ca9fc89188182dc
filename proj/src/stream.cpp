#include "haphazard/stream.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "haphazard/error.hpp"

namespace haphazard {
namespace {

void check_mask_config(const MaskConfig& cfg) {
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0))
    raise(Errc::invalid_input, "availability probability must be in [0,1]");
}

// 53-bit uniform in [0,1); fixed construction so streams are reproducible
// across platforms and standard-library versions.
inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

HaphazardStream stream_from_dataset(const Dataset& ds) {
  HaphazardStream out;
  out.feature_names = ds.feature_names;
  out.instances.reserve(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    std::vector<std::pair<FeatureId, double>> x;
    for (std::size_t c = 0; c < ds.width(); ++c)
      if (!is_missing(ds.rows[r][c])) x.emplace_back(static_cast<FeatureId>(c), ds.rows[r][c]);
    out.instances.push_back(
        make_instance(static_cast<std::int64_t>(r), std::move(x), ds.labels[r]));
  }
  return out;
}

HaphazardStream mask_stream(const Dataset& ds, const MaskConfig& cfg) {
  check_mask_config(cfg);
  std::mt19937_64 gen(cfg.seed);
  HaphazardStream out;
  out.feature_names = ds.feature_names;
  out.instances.reserve(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    std::vector<std::pair<FeatureId, double>> x;
    for (std::size_t c = 0; c < ds.width(); ++c) {
      const bool keep = uniform01(gen) < cfg.p;
      if (keep && !is_missing(ds.rows[r][c]))
        x.emplace_back(static_cast<FeatureId>(c), ds.rows[r][c]);
    }
    out.instances.push_back(
        make_instance(static_cast<std::int64_t>(r), std::move(x), ds.labels[r]));
  }
  return out;
}

HaphazardStream mask_stream(const HaphazardStream& stream, const MaskConfig& cfg) {
  check_mask_config(cfg);
  std::mt19937_64 gen(cfg.seed);
  HaphazardStream out;
  out.feature_names = stream.feature_names;
  out.instances.reserve(stream.instances.size());
  for (const auto& inst : stream.instances) {
    std::vector<std::pair<FeatureId, double>> x;
    for (const auto& pair : inst.x)
      if (uniform01(gen) < cfg.p) x.push_back(pair);
    out.instances.push_back(make_instance(inst.t, std::move(x), inst.label));
  }
  return out;
}

void write_jsonl(const HaphazardStream& stream, std::ostream& out) {
  for (const auto& inst : stream.instances) {
    nlohmann::json obj;
    obj["t"] = inst.t;
    nlohmann::json x = nlohmann::json::object();
    for (const auto& [id, value] : inst.x) x[std::to_string(id)] = value;
    obj["x"] = std::move(x);
    obj["y"] = inst.label;
    out << obj.dump() << '\n';
  }
}

void write_jsonl_file(const HaphazardStream& stream, const std::string& path) {
  std::ofstream out(path);
  if (!out) raise(Errc::io, "cannot write " + path);
  write_jsonl(stream, out);
  if (!out) raise(Errc::io, "write failed for " + path);
}

HaphazardStream read_jsonl(std::istream& in) {
  HaphazardStream stream;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      raise(Errc::parse, "bad stream line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!obj.contains("t") || !obj.contains("x") || !obj.contains("y") || !obj["x"].is_object())
      raise(Errc::format, "stream line " + std::to_string(line_no) +
                              " must be {\"t\":int,\"x\":{...},\"y\":0|1}");
    std::vector<std::pair<FeatureId, double>> x;
    for (const auto& [key, value] : obj["x"].items()) {
      std::size_t pos = 0;
      unsigned long id = 0;
      try {
        id = std::stoul(key, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != key.size() || !value.is_number())
        raise(Errc::format, "bad feature entry \"" + key + "\" at line " +
                                std::to_string(line_no));
      x.emplace_back(static_cast<FeatureId>(id), value.get<double>());
    }
    try {
      stream.instances.push_back(
          make_instance(obj["t"].get<std::int64_t>(), std::move(x), obj["y"].get<int>()));
    } catch (const Error& e) {
      raise(Errc::format, "stream line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return stream;
}

HaphazardStream read_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open " + path);
  return read_jsonl(in);
}

}  // namespace haphazard
