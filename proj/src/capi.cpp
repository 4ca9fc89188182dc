#include "haphazard.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include <json.hpp>

#include "haphazard/error.hpp"
#include "haphazard/harness.hpp"
#include "haphazard/learner.hpp"
#include "haphazard/metrics.hpp"
#include "haphazard/stream.hpp"

namespace {

using nlohmann::json;
using namespace haphazard;

thread_local std::string g_last_error;

int map_code(Errc code) {
  switch (code) {
    case Errc::ok: return HZ_OK;
    case Errc::invalid_input: return HZ_ERR_INVALID_INPUT;
    case Errc::parse: return HZ_ERR_PARSE;
    case Errc::format: return HZ_ERR_FORMAT;
    case Errc::ordering: return HZ_ERR_ORDERING;
    case Errc::encoding: return HZ_ERR_ENCODING;
    case Errc::undefined_metric: return HZ_ERR_UNDEFINED_METRIC;
    case Errc::capacity: return HZ_ERR_CAPACITY;
    case Errc::search: return HZ_ERR_SEARCH;
    case Errc::diverged: return HZ_ERR_DIVERGED;
    case Errc::io: return HZ_ERR_IO;
  }
  return HZ_ERR_UNKNOWN;
}

template <typename Fn>
hz_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return HZ_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return HZ_ERR_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HZ_ERR_UNKNOWN;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** slot, const json& j) {
  if (slot) *slot = dup_string(j.dump());
}

json parse_request(const char* request_json) {
  if (!request_json) raise(Errc::invalid_input, "null request");
  try {
    return json::parse(request_json);
  } catch (const json::exception& e) {
    raise(Errc::parse, std::string("bad request JSON: ") + e.what());
  }
}

ExperimentSpec spec_from_request(const json& request) {
  json spec = request;
  spec.erase("out");
  spec.erase("out_dir");
  spec.erase("seed");
  if (!spec.contains("model")) spec["model"] = "";
  if (!spec.contains("dataset")) raise(Errc::invalid_input, "request needs a dataset path");
  if (request.contains("seed") && !request.contains("seeds"))
    spec["seeds"] = json::array({request.at("seed").get<std::uint64_t>()});
  return ExperimentSpec::from_json(spec);
}

// Simulate/stream requests reuse the experiment fields without a model.
HaphazardStream open_stream(const json& request) {
  ExperimentSpec spec = spec_from_request(request);
  if (spec.dataset.empty()) raise(Errc::invalid_input, "request needs a dataset path");
  const std::uint64_t seed = spec.seeds.empty() ? 0 : spec.seeds[0];

  HaphazardStream stream;
  if (spec.loader == "stream") {
    stream = read_jsonl_file(spec.dataset);
    if (spec.p) stream = mask_stream(stream, MaskConfig{*spec.p, seed});
  } else {
    Dataset ds;
    if (spec.loader == "csv") {
      ds = load_csv(spec.dataset, spec.label_column, spec.missing_markers, spec.delimiter,
                    spec.header);
    } else if (spec.loader == "libsvm") {
      ds = load_libsvm(spec.dataset);
    } else {
      raise(Errc::invalid_input, "unknown loader: " + spec.loader + " (csv, libsvm, stream)");
    }
    stream = spec.p ? mask_stream(ds, MaskConfig{*spec.p, seed}) : stream_from_dataset(ds);
  }
  return stream;
}

json instance_to_json(const HaphazardInstance& inst) {
  json x = json::object();
  for (const auto& [id, value] : inst.x) x[std::to_string(id)] = value;
  return json{{"t", inst.t}, {"x", std::move(x)}, {"y", inst.label}};
}

HaphazardInstance instance_from_json(const char* instance_json, int label_override,
                                     bool use_override) {
  const json obj = parse_request(instance_json);
  if (!obj.is_object() || !obj.contains("t") || !obj.contains("x") || !obj.at("x").is_object())
    raise(Errc::format, "instance must be {\"t\":int,\"x\":{\"<id>\":value,...},\"y\":0|1}");
  std::vector<std::pair<FeatureId, double>> x;
  for (const auto& [key, value] : obj.at("x").items()) {
    std::size_t pos = 0;
    unsigned long id = 0;
    try {
      id = std::stoul(key, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != key.size() || !value.is_number())
      raise(Errc::format, "bad feature entry \"" + key + "\"");
    x.emplace_back(static_cast<FeatureId>(id), value.get<double>());
  }
  int label = 0;
  if (use_override)
    label = label_override;
  else if (obj.contains("y"))
    label = obj.at("y").get<int>();
  return make_instance(obj.at("t").get<std::int64_t>(), std::move(x), label);
}

}  // namespace

struct hz_learner {
  std::unique_ptr<OnlineLearner> impl;
};

struct hz_stream {
  HaphazardStream impl;
};

extern "C" {

const char* hz_version(void) { return "1.0.0"; }

const char* hz_last_error(void) { return g_last_error.c_str(); }

void hz_free(char* buf) { std::free(buf); }

hz_status hz_models(char** out_json) {
  return guarded([&] {
    json arr = json::array();
    for (const std::string& m : known_models()) arr.push_back(m);
    emit(out_json, arr);
  });
}

hz_status hz_simulate(const char* request_json, char** out_json) {
  return guarded([&] {
    const json request = parse_request(request_json);
    const HaphazardStream stream = open_stream(request);
    json response{{"instances", stream.instances.size()}, {"path", nullptr}};
    std::size_t features = stream.feature_names.size();
    if (features == 0) {
      FeatureUniverse universe;
      for (const auto& inst : stream.instances) universe.absorb(inst);
      features = universe.total_known();
    }
    response["features"] = features;
    if (request.contains("out") && !request.at("out").is_null()) {
      const std::string path = request.at("out").get<std::string>();
      write_jsonl_file(stream, path);
      response["path"] = path;
    }
    emit(out_json, response);
  });
}

hz_status hz_run(const char* request_json, char** out_json) {
  return guarded([&] {
    const json request = parse_request(request_json);
    const ExperimentSpec spec = spec_from_request(request);
    const RunRecord record = run_experiment(spec);
    json response = record.to_json();
    if (request.contains("out_dir") && !request.at("out_dir").is_null())
      response["saved_path"] = save_record(record, request.at("out_dir").get<std::string>());
    emit(out_json, response);
  });
}

hz_status hz_grid(const char* request_json, char** out_json) {
  return guarded([&] {
    if (!request_json) raise(Errc::invalid_input, "null request");
    nlohmann::ordered_json request;
    try {
      request = nlohmann::ordered_json::parse(request_json);
    } catch (const json::exception& e) {
      raise(Errc::parse, std::string("bad request JSON: ") + e.what());
    }
    const std::string model = request.at("model").get<std::string>();
    const nlohmann::ordered_json grid = request.at("grid");
    json base_json = request.contains("base") ? json::parse(request.at("base").dump())
                                              : json::object();
    if (!base_json.contains("model")) base_json["model"] = model;
    const ExperimentSpec base = spec_from_request(base_json);
    const int jobs = request.value("jobs", 1);
    const GridResult result = grid_search(model, grid, base, jobs);
    json cells = json::array();
    for (const GridCell& cell : result.cells)
      cells.push_back(json{{"config", json::parse(cell.config.dump())},
                           {"score", std::isfinite(cell.score) ? json(cell.score) : json(nullptr)}});
    emit(out_json, json{{"best_config", json::parse(result.best_config.dump())},
                        {"best_score", result.best_score},
                        {"cells", cells}});
  });
}

hz_status hz_report(const char* request_json, char** out_json) {
  return guarded([&] {
    const json request = parse_request(request_json);
    const std::string dir = request.at("records_dir").get<std::string>();
    const json grouping = request.value("grouping", json::object());
    const std::vector<RunRecord> records = load_records_dir(dir);
    const BenchmarkReport report = summarize(records, grouping);
    if (request.contains("out_csv")) {
      const std::string path = request.at("out_csv").get<std::string>();
      std::ofstream out(path);
      if (!out) raise(Errc::io, "cannot write " + path);
      out << report.csv;
    }
    if (request.contains("out_json")) {
      const std::string path = request.at("out_json").get<std::string>();
      std::ofstream out(path);
      if (!out) raise(Errc::io, "cannot write " + path);
      out << report.json.dump(2) << '\n';
    }
    emit(out_json, json{{"report", report.json}, {"csv", report.csv}});
  });
}

hz_status hz_carbon(const char* request_json, char** out_json) {
  return guarded([&] {
    const json request = parse_request(request_json);
    const double time_s = request.at("time_s").get<double>();
    HardwareProfile profile;
    if (request.contains("profile_path")) {
      const std::string path = request.at("profile_path").get<std::string>();
      std::ifstream in(path);
      if (!in) raise(Errc::io, "cannot open " + path);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        raise(Errc::parse, path + ": " + e.what());
      }
      profile = HardwareProfile::from_json(j);
    } else if (request.contains("profile")) {
      profile = HardwareProfile::from_json(request.at("profile"));
    } else {
      raise(Errc::invalid_input, "request needs profile or profile_path");
    }
    const CarbonEstimate est = carbon_estimate(time_s, profile);
    emit(out_json, json{{"energy_kwh", est.energy_kwh}, {"carbon_kg", est.carbon_kg}});
  });
}

hz_status hz_learner_new(const char* model, const char* config_json, uint64_t seed,
                         hz_learner** out) {
  return guarded([&] {
    if (!model || !out) raise(Errc::invalid_input, "null model or output pointer");
    json config = json::object();
    if (config_json && config_json[0] != '\0') config = parse_request(config_json);
    auto impl = make_learner(model, config, seed);
    *out = new hz_learner{std::move(impl)};
  });
}

hz_status hz_learner_predict(hz_learner* h, const char* instance_json, int* out_label,
                             double* out_score) {
  return guarded([&] {
    if (!h) raise(Errc::invalid_input, "null learner handle");
    const HaphazardInstance inst = instance_from_json(instance_json, 0, false);
    const Prediction pred = h->impl->predict(inst);
    if (out_label) *out_label = pred.label;
    if (out_score) *out_score = pred.score;
  });
}

hz_status hz_learner_update(hz_learner* h, const char* instance_json, int label) {
  return guarded([&] {
    if (!h) raise(Errc::invalid_input, "null learner handle");
    const HaphazardInstance inst = instance_from_json(instance_json, label, true);
    h->impl->update(inst);
    if (h->impl->diverged()) raise(Errc::diverged, "learner diverged");
  });
}

void hz_learner_free(hz_learner* h) { delete h; }

hz_status hz_stream_open(const char* request_json, hz_stream** out) {
  return guarded([&] {
    if (!out) raise(Errc::invalid_input, "null output pointer");
    const json request = parse_request(request_json);
    *out = new hz_stream{open_stream(request)};
  });
}

hz_status hz_stream_size(const hz_stream* h, size_t* out_size) {
  return guarded([&] {
    if (!h || !out_size) raise(Errc::invalid_input, "null stream handle or output pointer");
    *out_size = h->impl.instances.size();
  });
}

hz_status hz_stream_instance(const hz_stream* h, size_t index, char** out_json) {
  return guarded([&] {
    if (!h) raise(Errc::invalid_input, "null stream handle");
    if (index >= h->impl.instances.size())
      raise(Errc::invalid_input, "stream index out of range");
    emit(out_json, instance_to_json(h->impl.instances[index]));
  });
}

void hz_stream_free(hz_stream* h) { delete h; }

}  // extern "C"
