#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "m2m/cli.hpp"
#include "m2m/config.hpp"
#include "m2m/error.hpp"
#include "m2m/report_io.hpp"

using namespace m2m;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string config_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::Config);
    return e.what();
  }
  FAIL("expected a config error");
  return {};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path / name) << text;
    return path / name;
  }
};

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "m2m-access");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSmallCell = R"(
n_stations = 800
omega = 20
delta_c_pct = 50
horizon_s = 25
alarm.0.model = sqrt
alarm.0.d_max_m = 500
alarm.0.t_a_s = 7.5
)";

}  // namespace

TEST_CASE("defaults describe the reference cell") {
  const auto cfg = parse("");
  CHECK(cfg.cell.n_stations == 8000);
  CHECK(cfg.cell.protocol.omega == 40);
  CHECK(cfg.cell.protocol.delta_c == 100);
  CHECK(cfg.cell.protocol.l1 == 24);
  CHECK(cfg.cell.protocol.l2 == 16);
  CHECK(cfg.cell.deadlines.tau_p_s == doctest::Approx(300.0));
  CHECK(cfg.mode == AccessMode::Adaptive);
  CHECK(cfg.compare_omega.size() == 40);
  CHECK(cfg.cell.alarms.empty());
}

TEST_CASE("full config") {
  const auto cfg = parse(R"(# comment
n_stations = 1000   # trailing comment
radius_m = 10
lambda_p_per_s = 0.01
lambda_d_per_s = 0.002
omega = 25
delta_c_count = 7
l1 = 12
l2 = 9
mode = naive
trace_pools = true
alarm.0.model = exp
alarm.0.decay_per_m = 0.005
alarm.1.model = unit
alarm.1.speed_m_per_s = 3000
alarm.1.epicenter_x_m = 5
sweep.omega = 10, 20,30
sweep.delta_c_pct = 25,50
sweep.l1_frac = search
sweep.l2_frac = search
sweep.evaluation = simulated
compare.omega = 5,10
)");
  CHECK(cfg.cell.n_stations == 1000);
  CHECK(cfg.cell.protocol.n == 1000);
  CHECK(cfg.cell.protocol.delta_c == 7);
  CHECK(cfg.cell.protocol.l1 == 12);
  CHECK(cfg.cell.deadlines.tau_p_s == doctest::Approx(100.0));
  CHECK(cfg.mode == AccessMode::NaiveContentionFree);
  CHECK(cfg.trace_pools);
  REQUIRE(cfg.cell.alarms.size() == 2);
  CHECK(std::holds_alternative<ExpDecayCorrelation>(cfg.cell.alarms[0].correlation));
  CHECK(cfg.cell.alarms[1].speed_m_per_s == 3000.0);
  CHECK(cfg.cell.alarms[1].epicenter.x_m == 5.0);
  CHECK(cfg.grid.omega_values == std::vector<std::size_t>{10, 20, 30});
  CHECK_FALSE(cfg.grid.l1_frac);
  CHECK(cfg.grid.evaluation == Evaluation::Simulated);
  CHECK(cfg.compare_omega == std::vector<std::size_t>{5, 10});
}

TEST_CASE("config errors name the key") {
  CHECK(config_error("bogus = 1").find("bogus") != std::string::npos);
  CHECK(config_error("omega = forty").find("omega") != std::string::npos);
  CHECK(config_error("omega = 4\nomega = 5").find("omega") != std::string::npos);
  CHECK(config_error("alarm.0.model = sqrt").find("alarm.0.d_max_m") != std::string::npos);
  CHECK(config_error("alarm.0.model = cone").find("alarm.0.model") != std::string::npos);
  CHECK(config_error("mode = greedy").find("mode") != std::string::npos);
  CHECK(config_error("just words").find("line 1") != std::string::npos);
  CHECK(config_error("delta_c_count = 3\ndelta_c_pct = 20").find("delta_c") != std::string::npos);
  config_error("omega = 0");
  config_error("l1 = 50");
  config_error("tau_a_s = 100");
  CHECK_THROWS_AS(load_config("/nonexistent/cell.cfg"), Error);
}

TEST_CASE("cli usage errors") {
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  const auto r = cli({"analyze", "--config", "/nonexistent/x.cfg"});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.rfind("error: usage: ", 0) == 0);
}

TEST_CASE("cli errors are one categorized line") {
  TempDir dir("m2m_cli_errors");
  const auto bad = dir.write("bad.cfg", "omega = lots\n");
  auto r = cli({"analyze", "--config", bad.string(), "--out", dir.path.string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.rfind("error: config: ", 0) == 0);
  CHECK(r.err.find("omega") != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

  r = cli({"traffic", "--out", dir.path.string()});
  CHECK(r.code == kExitInvalidArgument);
  CHECK(r.err.find("--seed") != std::string::npos);

  r = cli({"traffic", "--seed", "1", "--out", dir.path.string()});
  CHECK(r.code == kExitInvalidArgument);
  CHECK(r.err.find("no scenarios") != std::string::npos);

  const auto tight = dir.write("tight.cfg", "tau_a_s = 3\n");
  r = cli({"simulate", "--config", tight.string(), "--seed", "1", "--out", dir.path.string()});
  CHECK(r.code == kExitInfeasible);
  CHECK(r.err.find("1.64") != std::string::npos);
}

TEST_CASE("analyze writes the cost report") {
  TempDir dir("m2m_cli_analyze");
  const auto cfg = dir.write("poll.cfg", "omega = 1\n");
  const auto r = cli({"analyze", "--config", cfg.string(), "--out", dir.path.string()});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(slurp(dir.path / "analysis.json"));
  CHECK(j["e_c"].get<double>() == doctest::Approx(8000.0));
  CHECK(j["pool_duration_s"].get<double>() == doctest::Approx(1.6));
}

TEST_CASE("stochastic commands are byte-reproducible") {
  TempDir dir("m2m_cli_repro");
  auto text = std::string(kSmallCell) + "trace_pools = true\n";
  const auto cfg = dir.write("cell.cfg", text);
  const auto a = dir.path / "a", b = dir.path / "b";
  for (const auto& out : {a, b}) {
    REQUIRE(cli({"simulate", "--config", cfg.string(), "--seed", "11", "--out", out.string()}).code == 0);
    REQUIRE(cli({"traffic", "--config", cfg.string(), "--seed", "11", "--out", out.string()}).code == 0);
  }
  for (const char* f : {"scenario_stats.json", "delay_histogram.csv", "pool_trace.jsonl", "activation_curve_0.csv",
                        "beta_fit_0.json"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto stats = Json::parse(slurp(a / "scenario_stats.json"));
  CHECK(stats["pools_run"].get<int>() == 10);
  CHECK(stats["unresolved_stations"].get<int>() == 0);
  CHECK(slurp(a / "activation_curve_0.csv").rfind("bin_start_s,count\n", 0) == 0);

  REQUIRE(cli({"simulate", "--config", cfg.string(), "--seed", "11", "--replications", "3", "--out",
               (dir.path / "c").string()})
              .code == 0);
  CHECK(Json::parse(slurp(dir.path / "c" / "scenario_stats.json"))["pools_run"].get<int>() == 30);
}

TEST_CASE("sweep and compare outputs") {
  TempDir dir("m2m_cli_sweep");
  const auto cfg = dir.write("cell.cfg", "sweep.omega = 20,40\nsweep.delta_c_pct = 25,50\ncompare.omega = 10,20,40\n");
  REQUIRE(cli({"sweep", "--config", cfg.string(), "--format", "csv", "--out", dir.path.string()}).code == 0);
  const auto csv = slurp(dir.path / "sweep.csv");
  CHECK(csv.rfind("omega,delta_c_pct,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(Json::parse(slurp(dir.path / "argmin.json")).contains("omega"));

  REQUIRE(cli({"compare-naive", "--config", cfg.string(), "--out", dir.path.string()}).code == 0);
  const auto cmp = Json::parse(slurp(dir.path / "naive_comparison.json"));
  CHECK(cmp["rows"].size() == 3);
  CHECK(cmp["ratio"].get<double>() >= 1.0);

  const std::string sim_text = "sweep.omega = 40\nsweep.delta_c_pct = 50\nsweep.evaluation = simulated\n";
  const auto no_alarm = dir.write("no_alarm.cfg", sim_text);
  const auto r = cli({"sweep", "--config", no_alarm.string(), "--seed", "3", "--out", dir.path.string()});
  CHECK(r.code == kExitInvalidArgument);
  CHECK(r.err.find("alarm scenario") != std::string::npos);
  const auto sim = dir.write("sim.cfg", sim_text + "alarm.0.model = sqrt\nalarm.0.d_max_m = 500\n");
  CHECK(cli({"sweep", "--config", sim.string(), "--out", dir.path.string()}).code == kExitInvalidArgument);
  CHECK(cli({"sweep", "--config", sim.string(), "--seed", "3", "--replications", "20", "--out", dir.path.string()})
            .code == 0);
  CHECK(cli({"sweep", "--format", "xml", "--out", dir.path.string()}).code == kExitUsage);
}
