#include "haphazard/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "haphazard/error.hpp"
#include "haphazard/learner.hpp"

namespace haphazard {
namespace {

std::string header_to_string(Header h) {
  switch (h) {
    case Header::automatic: return "auto";
    case Header::yes: return "yes";
    case Header::no: return "no";
  }
  return "auto";
}

Header header_from_string(const std::string& s) {
  if (s == "auto") return Header::automatic;
  if (s == "yes") return Header::yes;
  if (s == "no") return Header::no;
  raise(Errc::invalid_input, "unknown header mode: " + s);
}

// Either a parsed table (csv/libsvm) or an already-haphazard stream.
struct LoadedInput {
  std::optional<Dataset> dataset;
  std::optional<HaphazardStream> stream;
};

LoadedInput load_input(const ExperimentSpec& spec) {
  LoadedInput in;
  if (spec.loader == "csv") {
    in.dataset = load_csv(spec.dataset, spec.label_column, spec.missing_markers, spec.delimiter,
                          spec.header);
  } else if (spec.loader == "libsvm") {
    in.dataset = load_libsvm(spec.dataset);
  } else if (spec.loader == "stream") {
    in.stream = read_jsonl_file(spec.dataset);
  } else {
    raise(Errc::invalid_input, "unknown loader: " + spec.loader + " (csv, libsvm, stream)");
  }
  return in;
}

HaphazardStream realize_stream(const LoadedInput& in, const ExperimentSpec& spec,
                               std::uint64_t seed) {
  if (in.dataset) {
    if (spec.p) return mask_stream(*in.dataset, MaskConfig{*spec.p, seed});
    return stream_from_dataset(*in.dataset);
  }
  if (spec.p) return mask_stream(*in.stream, MaskConfig{*spec.p, seed});
  return *in.stream;
}

double population_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(xs.size()));
}

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

RunResult execute_run(const ExperimentSpec& spec, const LoadedInput& input, std::uint64_t seed) {
  RunResult result;
  result.seed = seed;
  const HaphazardStream stream = realize_stream(input, spec, seed);
  if (stream.instances.empty()) raise(Errc::invalid_input, "empty stream: " + spec.dataset);

  auto learner = make_learner(spec.model, spec.config, seed);
  MetricAccumulator acc;

  const auto start = std::chrono::steady_clock::now();
  std::size_t first = 0;
  if (learner->needs_pretraining()) {
    learner->pretrain(stream.instances[0]);
    first = 1;
  }
  for (std::size_t i = first; i < stream.instances.size(); ++i) {
    const HaphazardInstance& inst = stream.instances[i];
    const Prediction pred = learner->predict(inst);
    acc.record(pred.score, pred.label, inst.label);
    if (spec.store_predictions) {
      result.predictions.push_back(pred.label);
      result.scores.push_back(pred.score);
    }
    learner->update(inst);
    if (learner->diverged()) {
      result.failed = true;
      result.diagnostic = "learner diverged at t=" + std::to_string(inst.t);
      break;
    }
  }
  const auto stop = std::chrono::steady_clock::now();
  const double seconds = std::chrono::duration<double>(stop - start).count();

  if (acc.n() == 0) {
    result.failed = true;
    if (result.diagnostic.empty()) result.diagnostic = "no instances left to score";
    result.report.wall_time_s = seconds;
    return result;
  }
  result.report = acc.finalize(seconds);
  return result;
}

RunSummary summarize_runs(const std::vector<RunResult>& runs) {
  RunSummary s;
  s.runs = static_cast<int>(runs.size());
  std::vector<double> bacc, accuracy, errors, times, rocs, prcs;
  bool all_roc = true, all_prc = true;
  for (const RunResult& r : runs) {
    if (r.failed) {
      ++s.failed_runs;
      continue;
    }
    bacc.push_back(r.report.balanced_accuracy);
    accuracy.push_back(r.report.accuracy);
    errors.push_back(static_cast<double>(r.report.errors));
    times.push_back(r.report.wall_time_s);
    if (r.report.auroc) rocs.push_back(*r.report.auroc); else all_roc = false;
    if (r.report.auprc) prcs.push_back(*r.report.auprc); else all_prc = false;
  }
  if (bacc.empty()) return s;
  s.mean_bacc = mean_of(bacc);
  s.std_bacc = population_std(bacc, s.mean_bacc);
  s.mean_accuracy = mean_of(accuracy);
  s.std_accuracy = population_std(accuracy, s.mean_accuracy);
  s.mean_errors = mean_of(errors);
  s.mean_time_s = mean_of(times);
  s.std_time_s = population_std(times, s.mean_time_s);
  if (all_roc && !rocs.empty()) s.mean_auroc = mean_of(rocs);
  if (all_prc && !prcs.empty()) s.mean_auprc = mean_of(prcs);
  return s;
}

RunRecord run_loaded(const ExperimentSpec& spec, const LoadedInput& input) {
  RunRecord record;
  record.hash = spec_hash(spec);
  record.spec = spec.to_json();
  for (std::uint64_t seed : effective_seeds(spec)) record.runs.push_back(execute_run(spec, input, seed));
  record.summary = summarize_runs(record.runs);
  return record;
}

nlohmann::json summary_to_json(const RunSummary& s) {
  nlohmann::json j{{"runs", s.runs},
                   {"failed_runs", s.failed_runs},
                   {"mean_bacc", s.mean_bacc},
                   {"std_bacc", s.std_bacc},
                   {"mean_accuracy", s.mean_accuracy},
                   {"std_accuracy", s.std_accuracy},
                   {"mean_errors", s.mean_errors},
                   {"mean_time_s", s.mean_time_s},
                   {"std_time_s", s.std_time_s}};
  if (s.mean_auroc) j["mean_auroc"] = *s.mean_auroc;
  if (s.mean_auprc) j["mean_auprc"] = *s.mean_auprc;
  return j;
}

RunSummary summary_from_json(const nlohmann::json& j) {
  RunSummary s;
  s.runs = j.at("runs").get<int>();
  s.failed_runs = j.at("failed_runs").get<int>();
  s.mean_bacc = j.at("mean_bacc").get<double>();
  s.std_bacc = j.at("std_bacc").get<double>();
  s.mean_accuracy = j.at("mean_accuracy").get<double>();
  s.std_accuracy = j.at("std_accuracy").get<double>();
  s.mean_errors = j.at("mean_errors").get<double>();
  s.mean_time_s = j.at("mean_time_s").get<double>();
  s.std_time_s = j.at("std_time_s").get<double>();
  if (j.contains("mean_auroc")) s.mean_auroc = j.at("mean_auroc").get<double>();
  if (j.contains("mean_auprc")) s.mean_auprc = j.at("mean_auprc").get<double>();
  return s;
}

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json j{{"model", model},
                   {"config", config},
                   {"dataset", dataset},
                   {"loader", loader},
                   {"label_column", label_column},
                   {"missing_markers", missing_markers},
                   {"delimiter", std::string(1, delimiter)},
                   {"header", header_to_string(header)},
                   {"seeds", seeds},
                   {"repeats", repeats},
                   {"store_predictions", store_predictions}};
  if (p) j["p"] = *p; else j["p"] = nullptr;
  return j;
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  s.model = j.at("model").get<std::string>();
  s.config = j.value("config", nlohmann::json::object());
  s.dataset = j.at("dataset").get<std::string>();
  s.loader = j.value("loader", std::string("csv"));
  s.label_column = j.value("label_column", std::string("-1"));
  s.missing_markers = j.value("missing_markers", kDefaultMissingMarkers);
  const std::string delim = j.value("delimiter", std::string(","));
  if (delim.size() != 1) raise(Errc::invalid_input, "delimiter must be one character");
  s.delimiter = delim[0];
  s.header = header_from_string(j.value("header", std::string("auto")));
  if (j.contains("p") && !j.at("p").is_null()) s.p = j.at("p").get<double>();
  s.seeds = j.value("seeds", std::vector<std::uint64_t>{});
  s.repeats = j.value("repeats", 0);
  s.store_predictions = j.value("store_predictions", true);
  return s;
}

std::string spec_hash(const ExperimentSpec& spec) {
  const std::string canonical = spec.to_json().dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

std::vector<std::uint64_t> effective_seeds(const ExperimentSpec& spec) {
  if (!spec.seeds.empty()) return spec.seeds;
  int n = spec.repeats;
  if (n <= 0) {
    const bool det = make_learner(spec.model, spec.config, 0)->deterministic();
    n = det ? 1 : 5;
  }
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) seeds[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i);
  return seeds;
}

nlohmann::json RunRecord::to_json() const {
  nlohmann::json jruns = nlohmann::json::array();
  for (const RunResult& r : runs) {
    nlohmann::json jr{{"seed", r.seed},
                      {"report", r.report.to_json()},
                      {"failed", r.failed},
                      {"diagnostic", r.diagnostic}};
    if (!r.predictions.empty()) {
      jr["predictions"] = r.predictions;
      jr["scores"] = r.scores;
    }
    jruns.push_back(std::move(jr));
  }
  return nlohmann::json{
      {"hash", hash}, {"spec", spec}, {"runs", jruns}, {"summary", summary_to_json(summary)}};
}

RunRecord RunRecord::from_json(const nlohmann::json& j) {
  RunRecord rec;
  rec.hash = j.at("hash").get<std::string>();
  rec.spec = j.at("spec");
  for (const auto& jr : j.at("runs")) {
    RunResult r;
    r.seed = jr.at("seed").get<std::uint64_t>();
    r.report = MetricsReport::from_json(jr.at("report"));
    r.failed = jr.at("failed").get<bool>();
    r.diagnostic = jr.at("diagnostic").get<std::string>();
    if (jr.contains("predictions")) {
      r.predictions = jr.at("predictions").get<std::vector<int>>();
      r.scores = jr.at("scores").get<std::vector<double>>();
    }
    rec.runs.push_back(std::move(r));
  }
  rec.summary = summary_from_json(j.at("summary"));
  return rec;
}

RunRecord run_experiment(const ExperimentSpec& spec) {
  return run_loaded(spec, load_input(spec));
}

GridResult grid_search(const std::string& model, const nlohmann::ordered_json& grid,
                       ExperimentSpec base, int jobs) {
  if (!grid.is_object() || grid.empty())
    raise(Errc::invalid_input, "grid must be a non-empty object of value lists");
  base.model = model;
  base.p = 0.5;

  std::vector<std::string> keys;
  std::vector<std::vector<nlohmann::json>> values;
  for (auto it = grid.begin(); it != grid.end(); ++it) {
    keys.push_back(it.key());
    std::vector<nlohmann::json> vs;
    if (it.value().is_array()) {
      for (const auto& v : it.value()) vs.push_back(v);
    } else {
      vs.push_back(it.value());
    }
    if (vs.empty()) raise(Errc::invalid_input, "grid key has no values: " + it.key());
    values.push_back(std::move(vs));
  }

  // Odometer enumeration, last key fastest: declared-order lexicographic.
  std::vector<nlohmann::ordered_json> cells;
  std::vector<std::size_t> idx(keys.size(), 0);
  for (;;) {
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < keys.size(); ++k) cfg[keys[k]] = values[k][idx[k]];
    cells.push_back(std::move(cfg));
    std::size_t k = keys.size();
    while (k-- > 0) {
      if (++idx[k] < values[k].size()) break;
      idx[k] = 0;
      if (k == 0) goto enumerated;
    }
    if (keys.empty()) break;
  }
enumerated:;

  const LoadedInput input = load_input(base);
  const double minus_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> scores(cells.size(), minus_inf);
  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    ExperimentSpec spec = base;
    spec.config = nlohmann::json::parse(cells[i].dump());
    spec.store_predictions = false;
    try {
      const RunRecord record = run_loaded(spec, input);
      if (record.summary.failed_runs == 0) scores[i] = record.summary.mean_bacc;
    } catch (const Error&) {
      // failed cell keeps -inf
    }
  });

  GridResult result;
  result.best_score = minus_inf;
  std::size_t best = cells.size();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    result.cells.push_back(GridCell{cells[i], scores[i]});
    if (scores[i] > result.best_score) {
      result.best_score = scores[i];
      best = i;
    }
  }
  if (best == cells.size()) raise(Errc::search, "every grid cell failed");
  result.best_config = cells[best];
  return result;
}

BenchmarkReport summarize(const std::vector<RunRecord>& records, const nlohmann::json& grouping) {
  if (records.empty()) raise(Errc::invalid_input, "summarize requires at least one record");

  struct Entry {
    std::string model, dataset, pkey;
    const RunRecord* record;
  };
  std::vector<Entry> entries;
  for (const RunRecord& r : records) {
    Entry e;
    e.model = r.spec.at("model").get<std::string>();
    e.dataset = r.spec.at("dataset").get<std::string>();
    e.pkey = r.spec.at("p").is_null() ? "real" : format_number(r.spec.at("p").get<double>());
    e.record = &r;
    entries.push_back(e);
  }

  // Win counts per (dataset, p) cell; ties credit every tied model.
  std::map<std::pair<std::string, std::string>, std::vector<const Entry*>> cells_map;
  for (const Entry& e : entries) cells_map[{e.dataset, e.pkey}].push_back(&e);
  std::map<std::string, int> wins;
  for (const Entry& e : entries) wins.emplace(e.model, 0);
  for (const auto& [key, cell] : cells_map) {
    double best = -std::numeric_limits<double>::infinity();
    for (const Entry* e : cell) best = std::max(best, e->record->summary.mean_bacc);
    for (const Entry* e : cell)
      if (e->record->summary.mean_bacc == best) ++wins[e->model];
  }

  auto dataset_set = [&grouping](const char* key) {
    std::set<std::string> out;
    if (grouping.contains(key))
      for (const auto& d : grouping.at(key)) out.insert(d.get<std::string>());
    return out;
  };
  const std::set<std::string> small = dataset_set("small");
  const std::set<std::string> medium = dataset_set("medium");
  const std::set<std::string> large = dataset_set("large");
  const std::string susy = grouping.value("susy", std::string());
  const std::string higgs = grouping.value("higgs", std::string());

  nlohmann::json jmodels = nlohmann::json::object();
  std::map<std::string, AggregateReport> aggregates;
  for (const auto& [model, win_count] : wins) {
    auto group_stats = [&](const std::set<std::string>& members) -> std::optional<GroupStats> {
      std::vector<double> baccs, stds, times;
      for (const Entry& e : entries) {
        if (e.model != model || !members.count(e.dataset)) continue;
        baccs.push_back(e.record->summary.mean_bacc * 100.0);
        stds.push_back(e.record->summary.std_bacc * 100.0);
        times.push_back(e.record->summary.mean_time_s);
      }
      if (baccs.empty()) return std::nullopt;
      return GroupStats{mean_of(baccs), mean_of(stds), mean_of(times)};
    };
    AggregateInput in;
    in.small = group_stats(small);
    in.medium = group_stats(medium);
    in.large = group_stats(large);
    for (const Entry& e : entries) {
      if (e.model != model) continue;
      if (!susy.empty() && e.dataset == susy) in.susy_time_s = e.record->summary.mean_time_s;
      if (!higgs.empty() && e.dataset == higgs) in.higgs_time_s = e.record->summary.mean_time_s;
    }
    const AggregateReport agg = aggregate_report(in);
    aggregates.emplace(model, agg);

    nlohmann::json jm;
    auto put_group = [&jm](const char* name, const std::optional<GroupStats>& g) {
      if (!g) return;
      jm["groups"][name] = {{"mean_bacc", g->mean_bacc},
                            {"mean_std", g->mean_std},
                            {"mean_time_s", g->mean_time_s}};
    };
    put_group("small", in.small);
    put_group("medium", in.medium);
    put_group("large", in.large);
    jm["aggregate"] = agg.to_json();
    jm["wins"] = win_count;
    jmodels[model] = std::move(jm);
  }

  BenchmarkReport report;
  report.json = nlohmann::json{{"wins", wins}, {"models", jmodels}};

  std::ostringstream csv;
  csv << "Model,Wins,Performance,DataScalability,Consistency,Speed,FeatureScalability\n";
  for (const auto& [model, win_count] : wins) {
    const AggregateReport& agg = aggregates.at(model);
    auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    csv << model << ',' << win_count << ',' << cell(agg.performance) << ','
        << cell(agg.data_scalability) << ',' << cell(agg.prediction_consistency) << ','
        << cell(agg.speed) << ',' << cell(agg.feature_scalability) << '\n';
  }
  report.csv = csv.str();
  return report;
}

std::string save_record(const RunRecord& record, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / (record.hash + ".json");
  {
    std::ofstream out(path);
    if (!out) raise(Errc::io, "cannot write " + path.string());
    out << record.to_json().dump(2) << '\n';
  }
  char stamp[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  std::ofstream manifest(std::filesystem::path(dir) / "manifest.jsonl", std::ios::app);
  if (!manifest) raise(Errc::io, "cannot append manifest in " + dir);
  manifest << nlohmann::json{{"hash", record.hash}, {"written_at", stamp}}.dump() << '\n';
  return path.string();
}

RunRecord load_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::parse, path + ": " + e.what());
  }
  return RunRecord::from_json(j);
}

std::vector<RunRecord> load_records_dir(const std::string& dir) {
  std::vector<RunRecord> out;
  if (!std::filesystem::is_directory(dir)) raise(Errc::io, "not a directory: " + dir);
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) out.push_back(load_record(p.string()));
  return out;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace haphazard
