#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#ifndef HAPHAZARD_CLI_PATH
#error "HAPHAZARD_CLI_PATH must point at the command-line binary"
#endif
#ifndef HAPHAZARD_PROFILE_DIR
#error "HAPHAZARD_PROFILE_DIR must point at the bundled hardware profiles"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("hz_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "hz_cli_io";
  fs::create_directories(dir);
  const fs::path out_path = dir / ("out" + std::to_string(counter) + ".txt");
  const fs::path err_path = dir / ("err" + std::to_string(counter) + ".txt");
  ++counter;

  std::string cmd = env_prefix;
  if (!cmd.empty()) cmd += ' ';
  cmd += '"';
  cmd += HAPHAZARD_CLI_PATH;
  cmd += "\" " + args + " >\"" + out_path.string() + "\" 2>\"" + err_path.string() + '"';

  const int raw = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

std::string write_csv(const fs::path& dir, std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> noise(0.0, 0.2);
  const fs::path path = dir / "data.csv";
  std::ofstream out(path);
  out << "f0,f1,f2,y\n";
  for (std::size_t r = 0; r < rows; ++r) {
    const int label = static_cast<int>(gen() & 1u);
    for (int c = 0; c < 3; ++c) out << ((label == 1 ? 1.0 : -1.0) + noise(gen)) << ',';
    out << label << '\n';
  }
  return path.string();
}

std::string q(const std::string& s) { return '"' + s + '"'; }

}  // namespace

TEST_CASE("help succeeds and bad usage exits with code 2") {
  const CliResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("simulate") != std::string::npos);
  CHECK(help.out.find("carbon") != std::string::npos);

  CHECK(run_cli("").exit_code == 2);                 // a subcommand is required
  CHECK(run_cli("frobnicate").exit_code == 2);       // unknown subcommand
  CHECK(run_cli("carbon --time 1").exit_code == 2);  // missing required flag
}

TEST_CASE("carbon subcommand evaluates the bundled profile") {
  const std::string profile = std::string(HAPHAZARD_PROFILE_DIR) + "/dgx128.json";
  const CliResult r = run_cli("carbon --time 9579.05 --profile " + q(profile));
  REQUIRE(r.exit_code == 0);
  const json resp = json::parse(r.out);
  CHECK(resp.at("energy_kwh").get<double>() == doctest::Approx(8.52037).epsilon(1e-4));
  CHECK(resp.at("carbon_kg").get<double>() == doctest::Approx(0.064925).epsilon(1e-4));

  const CliResult missing = run_cli("carbon --time 1 --profile /no/such/profile.json");
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("error:") != std::string::npos);
}

TEST_CASE("simulate writes a deterministic stream file") {
  const fs::path dir = fresh_dir("sim");
  const std::string csv = write_csv(dir, 10, 21);
  const fs::path s1 = dir / "s1.jsonl";
  const fs::path s2 = dir / "s2.jsonl";

  const CliResult r1 = run_cli("simulate --dataset " + q(csv) + " --p 0.5 --seed 1 --out " +
                               q(s1.string()));
  REQUIRE(r1.exit_code == 0);
  const json resp = json::parse(r1.out);
  CHECK(resp.at("instances") == 10);
  CHECK(resp.at("features") == 3);

  const CliResult r2 = run_cli("simulate --dataset " + q(csv) + " --p 0.5 --seed 1 --out " +
                               q(s2.string()));
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(s1) == slurp(s2));
  CHECK(!slurp(s1).empty());

  const CliResult bad = run_cli("simulate --dataset /no/such/file.csv --out " +
                                q((dir / "x.jsonl").string()));
  CHECK(bad.exit_code == 2);
  fs::remove_all(dir);
}

TEST_CASE("run persists records and report reads them back") {
  const fs::path dir = fresh_dir("run");
  const std::string csv = write_csv(dir, 20, 22);
  const fs::path results = dir / "results";

  const CliResult r = run_cli("run --dataset " + q(csv) +
                              " --model nb3 --repeats 2 --out " + q(results.string()));
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("nb3") != std::string::npos);
  CHECK(r.out.find("record=") != std::string::npos);
  CHECK(fs::exists(results / "manifest.jsonl"));

  int json_files = 0;
  for (const auto& entry : fs::directory_iterator(results))
    if (entry.path().extension() == ".json") ++json_files;
  CHECK(json_files == 1);

  const fs::path groups = dir / "groups.json";
  std::ofstream(groups) << json{{"small", {csv}}}.dump();
  const CliResult rep = run_cli("report --out " + q(results.string()) + " --groups " +
                                q(groups.string()));
  REQUIRE(rep.exit_code == 0);
  CHECK(rep.out.rfind("Model,Wins,", 0) == 0);
  CHECK(fs::exists(results / "summary.csv"));
  CHECK(fs::exists(results / "summary.json"));
  CHECK(slurp(results / "summary.csv") == rep.out);

  const CliResult unknown = run_cli("run --dataset " + q(csv) + " --model perceptron --out " +
                                    q((dir / "r2").string()));
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.err.find("error:") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("results directory env var overrides the flag") {
  const fs::path dir = fresh_dir("env");
  const std::string csv = write_csv(dir, 12, 23);
  const fs::path env_dir = dir / "from_env";
  const fs::path flag_dir = dir / "from_flag";

  const CliResult r = run_cli("run --dataset " + q(csv) + " --model nb3 --out " +
                                  q(flag_dir.string()),
                              "HAPHAZARD_RESULTS_DIR=" + q(env_dir.string()));
  REQUIRE(r.exit_code == 0);
  CHECK(fs::exists(env_dir / "manifest.jsonl"));
  CHECK(!fs::exists(flag_dir));
  fs::remove_all(dir);
}

TEST_CASE("a failed run exits with code 1") {
  const fs::path dir = fresh_dir("fail");
  const std::string csv = write_csv(dir, 20, 24);
  const fs::path config = dir / "config.json";
  std::ofstream(config) << json{{"ocds", {{"beta0", 1e20}, {"beta1", 0.0}, {"beta2", 0.0},
                                          {"alpha", 0.0}}}}.dump();
  const CliResult r = run_cli("run --dataset " + q(csv) + " --model ocds --config " +
                              q(config.string()) + " --out " + q((dir / "results").string()));
  CHECK(r.exit_code == 1);
  CHECK(r.out.find("failed=1") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("grid subcommand writes the best cell") {
  const fs::path dir = fresh_dir("grid");
  const std::string csv = write_csv(dir, 20, 25);
  const fs::path grid_file = dir / "grid.json";
  std::ofstream(grid_file) << json{{"olvf", {{"C", {0.01, 1.0}}}}}.dump();

  const CliResult r = run_cli("grid --dataset " + q(csv) + " --model olvf --grid " +
                              q(grid_file.string()) + " --jobs 2 --out " +
                              q((dir / "results").string()));
  REQUIRE(r.exit_code == 0);
  const json best = json::parse(r.out);
  CHECK(best.at("model") == "olvf");
  CHECK(best.at("best_config").contains("C"));
  CHECK(fs::exists(dir / "results" / "olvf_best.json"));

  const CliResult absent = run_cli("grid --dataset " + q(csv) + " --model nb3 --grid " +
                                   q(grid_file.string()));
  CHECK(absent.exit_code == 2);
  fs::remove_all(dir);
}
