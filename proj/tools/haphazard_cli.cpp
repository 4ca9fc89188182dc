// Command-line front end; all work happens behind the C API in haphazard.h.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <haphazard.h>

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

// 0 success, 1 evaluation failure, 2 usage/input error.
int status_to_exit(hz_status status) {
  switch (status) {
    case HZ_OK:
      return 0;
    case HZ_ERR_INVALID_INPUT:
    case HZ_ERR_PARSE:
    case HZ_ERR_FORMAT:
    case HZ_ERR_ENCODING:
    case HZ_ERR_IO:
      return 2;
    default:
      return 1;
  }
}

int call_api(hz_status (*fn)(const char*, char**), const std::string& request, json* response) {
  char* out = nullptr;
  const hz_status status = fn(request.c_str(), &out);
  if (status != HZ_OK) {
    std::cerr << "error: " << hz_last_error() << "\n";
    if (out) hz_free(out);
    return status_to_exit(status);
  }
  if (response && out) *response = json::parse(out);
  if (out) hz_free(out);
  return 0;
}

std::string results_dir(const std::string& flag_value) {
  const char* env = std::getenv("HAPHAZARD_RESULTS_DIR");
  if (env && *env) return env;
  return flag_value;
}

struct SourceArgs {
  std::string dataset;
  std::string loader = "csv";
  std::string label_col = "-1";
  std::vector<std::string> missing;
  std::string delimiter = ",";
  std::string header = "auto";

  void attach(CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--dataset", dataset, "Input file path");
    if (required) opt->required();
    cmd->add_option("--loader", loader, "Input format")
        ->check(CLI::IsMember({"csv", "libsvm", "stream"}));
    cmd->add_option("--label-col", label_col,
                    "Label column: name or index, negative counts from the end");
    cmd->add_option("--missing", missing, "Missing-value markers")->expected(-1);
    cmd->add_option("--delimiter", delimiter, "CSV delimiter character");
    cmd->add_option("--header", header, "CSV header handling")
        ->check(CLI::IsMember({"auto", "yes", "no"}));
  }

  void fill(json& request) const {
    request["dataset"] = dataset;
    request["loader"] = loader;
    request["label_column"] = label_col;
    if (!missing.empty()) request["missing_markers"] = missing;
    request["delimiter"] = delimiter;
    request["header"] = header;
  }
};

json read_json_file(const std::string& path, bool* ok) {
  std::ifstream in(path);
  if (!in) {
    *ok = false;
    return json();
  }
  try {
    json j;
    in >> j;
    *ok = true;
    return j;
  } catch (const json::exception& e) {
    std::cerr << "error: " << path << ": " << e.what() << "\n";
    *ok = false;
    return json();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark harness for online learners on haphazard (dimension-varying) streams"};
  app.require_subcommand(1);

  // simulate ---------------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "Mask a dataset into a stream file");
  SourceArgs sim_src;
  sim_src.attach(simulate, true);
  std::optional<double> sim_p;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  simulate->add_option("--p", sim_p, "Per-cell availability probability in [0,1]");
  simulate->add_option("--seed", sim_seed, "Mask seed");
  simulate->add_option("--out", sim_out, "Output stream path (JSON lines)")->required();

  // run --------------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run models over a dataset and save run records");
  SourceArgs run_src;
  run_src.attach(run, true);
  std::vector<std::string> run_models;
  std::vector<double> run_ps;
  std::vector<std::uint64_t> run_seeds;
  int run_repeats = 0;
  std::string run_config, run_out = "results";
  int run_jobs = 1;
  run->add_option("--model", run_models, "Model name(s)")->required()->expected(-1);
  run->add_option("--p", run_ps, "Availability probabilities; omit to use the data as-is")
      ->expected(-1);
  run->add_option("--seeds,--seed", run_seeds, "Seed list")->expected(-1);
  run->add_option("--repeats", run_repeats, "Runs per spec when --seeds is omitted");
  run->add_option("--config", run_config, "JSON config file, one table per model");
  run->add_option("--out", run_out, "Results directory (env HAPHAZARD_RESULTS_DIR overrides)");
  run->add_option("--jobs", run_jobs, "Parallel cells");

  // grid -------------------------------------------------------------------
  auto* grid = app.add_subcommand("grid", "Hyperparameter grid search at p = 0.5");
  SourceArgs grid_src;
  grid_src.attach(grid, true);
  std::string grid_model, grid_file, grid_out = "results";
  std::vector<std::uint64_t> grid_seeds;
  int grid_repeats = 0, grid_jobs = 1;
  grid->add_option("--model", grid_model, "Model name")->required();
  grid->add_option("--grid", grid_file, "JSON grid file, one table per model")->required();
  grid->add_option("--seeds,--seed", grid_seeds, "Seed list")->expected(-1);
  grid->add_option("--repeats", grid_repeats, "Runs per cell when --seeds is omitted");
  grid->add_option("--out", grid_out, "Output directory (env HAPHAZARD_RESULTS_DIR overrides)");
  grid->add_option("--jobs", grid_jobs, "Parallel cells");

  // report -----------------------------------------------------------------
  auto* report = app.add_subcommand("report", "Summarize saved run records");
  std::string report_dir = "results", report_groups;
  report->add_option("--out", report_dir,
                     "Records directory (env HAPHAZARD_RESULTS_DIR overrides); summary "
                     "files are written next to the records");
  report->add_option("--groups", report_groups,
                     "JSON grouping file: {\"small\":[...],\"medium\":[...],\"large\":[...],"
                     "\"susy\":...,\"higgs\":...}");

  // carbon -----------------------------------------------------------------
  auto* carbon = app.add_subcommand("carbon", "Energy and carbon estimate for a wall time");
  double carbon_time = 0.0;
  std::string carbon_profile;
  carbon->add_option("--time", carbon_time, "Wall time in seconds")->required();
  carbon->add_option("--profile", carbon_profile, "Hardware profile JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (simulate->parsed()) {
    json request;
    sim_src.fill(request);
    if (sim_p) request["p"] = *sim_p;
    request["seed"] = sim_seed;
    request["out"] = sim_out;
    json response;
    const int code = call_api(hz_simulate, request.dump(), &response);
    if (code != 0) return code;
    std::cout << response.dump() << "\n";
    return 0;
  }

  if (run->parsed()) {
    json config_tables = json::object();
    if (!run_config.empty()) {
      bool ok = false;
      config_tables = read_json_file(run_config, &ok);
      if (!ok) {
        std::cerr << "error: cannot read config file " << run_config << "\n";
        return 2;
      }
    }
    const std::string out_dir = results_dir(run_out);
    int worst = 0;
    for (const std::string& model : run_models) {
      std::vector<json> p_values;
      if (run_ps.empty())
        p_values.push_back(nullptr);
      else
        for (double p : run_ps) p_values.push_back(p);
      for (const json& p : p_values) {
        json request;
        run_src.fill(request);
        request["model"] = model;
        request["config"] = config_tables.value(model, json::object());
        request["p"] = p;
        if (!run_seeds.empty()) request["seeds"] = run_seeds;
        if (run_repeats > 0) request["repeats"] = run_repeats;
        request["out_dir"] = out_dir;
        json response;
        const int code = call_api(hz_run, request.dump(), &response);
        if (code != 0) return code;
        const json& summary = response["summary"];
        std::cout << model << " " << run_src.dataset << " p="
                  << (p.is_null() ? std::string("real") : std::to_string(p.get<double>()))
                  << " bAcc=" << summary["mean_bacc"].get<double>() * 100.0
                  << " +- " << summary["std_bacc"].get<double>() * 100.0
                  << " time_s=" << summary["mean_time_s"].get<double>()
                  << " failed=" << summary["failed_runs"].get<int>()
                  << " record=" << response.value("saved_path", std::string()) << "\n";
        if (summary["failed_runs"].get<int>() > 0) worst = 1;
      }
    }
    return worst;
  }

  if (grid->parsed()) {
    std::ifstream in(grid_file);
    if (!in) {
      std::cerr << "error: cannot read grid file " << grid_file << "\n";
      return 2;
    }
    ordered_json tables;
    try {
      in >> tables;
    } catch (const json::exception& e) {
      std::cerr << "error: " << grid_file << ": " << e.what() << "\n";
      return 2;
    }
    if (!tables.contains(grid_model)) {
      std::cerr << "error: grid file has no table for model " << grid_model << "\n";
      return 2;
    }
    ordered_json request;
    request["model"] = grid_model;
    request["grid"] = tables[grid_model];
    json base;
    grid_src.fill(base);
    if (!grid_seeds.empty()) base["seeds"] = grid_seeds;
    if (grid_repeats > 0) base["repeats"] = grid_repeats;
    request["base"] = ordered_json::parse(base.dump());
    request["jobs"] = grid_jobs;
    json response;
    const int code = call_api(hz_grid, request.dump(), &response);
    if (code != 0) return code;

    const std::string out_dir = results_dir(grid_out);
    json best{{"model", grid_model},
              {"best_config", response["best_config"]},
              {"best_score", response["best_score"]}};
    const std::string best_path = out_dir + "/" + grid_model + "_best.json";
    std::error_code fs_err;
    std::filesystem::create_directories(out_dir, fs_err);
    std::ofstream out(best_path);
    if (!out) {
      std::cerr << "error: cannot write " << best_path << "\n";
      return 2;
    }
    out << best.dump(2) << "\n";
    std::cout << best.dump() << "\n";
    return 0;
  }

  if (report->parsed()) {
    const std::string dir = results_dir(report_dir);
    json request{{"records_dir", dir},
                 {"out_csv", dir + "/summary.csv"},
                 {"out_json", dir + "/summary.json"}};
    if (!report_groups.empty()) {
      bool ok = false;
      request["grouping"] = read_json_file(report_groups, &ok);
      if (!ok) {
        std::cerr << "error: cannot read groups file " << report_groups << "\n";
        return 2;
      }
    }
    json response;
    const int code = call_api(hz_report, request.dump(), &response);
    if (code != 0) return code;
    std::cout << response["csv"].get<std::string>();
    return 0;
  }

  if (carbon->parsed()) {
    json request{{"time_s", carbon_time}, {"profile_path", carbon_profile}};
    json response;
    const int code = call_api(hz_carbon, request.dump(), &response);
    if (code != 0) return code;
    std::cout << response.dump() << "\n";
    return 0;
  }

  return 2;
}
