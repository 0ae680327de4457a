#include "m2m/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "m2m/config.hpp"
#include "m2m/error.hpp"
#include "m2m/report_io.hpp"

namespace m2m {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::optional<std::size_t> replications;
  std::string format = "json";
};

ExperimentConfig load(const Options& o) {
  if (!o.config_path.empty()) return load_config(o.config_path);
  std::istringstream empty;
  return parse_config(empty);
}

std::uint64_t need_seed(const Options& o, const std::string& command) {
  if (!o.seed) fail(ErrorCategory::InvalidArgument, command + " requires --seed");
  return *o.seed;
}

std::ofstream open_output(const Options& o, const std::string& name) {
  std::error_code ec;
  fs::create_directories(o.out_dir, ec);
  if (ec) fail(ErrorCategory::Io, "cannot create output directory '" + o.out_dir + "': " + ec.message());
  const fs::path path = fs::path(o.out_dir) / name;
  std::ofstream os(path);
  if (!os) fail(ErrorCategory::Io, "cannot write '" + path.string() + "'");
  return os;
}

void write_json(const Options& o, const std::string& name, const Json& j) {
  auto os = open_output(o, name);
  os << j.dump(2) << '\n';
}

void cmd_traffic(const Options& o, std::ostream& out) {
  const auto cfg = load(o);
  const auto seed = need_seed(o, "traffic");
  if (cfg.cell.alarms.empty()) fail(ErrorCategory::InvalidArgument, "no scenarios");
  const auto geometry = place_stations(cfg.cell.n_stations, cfg.cell.radius_m, cfg.cell.geometry_seed);
  for (std::size_t i = 0; i < cfg.cell.alarms.size(); ++i) {
    const auto curve = activation_curve(geometry, cfg.cell.alarms[i], cfg.cell.bin_width_s, mix64(seed + i));
    {
      auto os = open_output(o, "activation_curve_" + std::to_string(i) + ".csv");
      write_csv(os, curve);
    }
    Json fit_json;
    try {
      fit_json = to_json(fit_beta(curve));
      fit_json["fittable"] = true;
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::Unfittable) throw;
      fit_json = Json{{"fittable", false}};
    }
    fit_json["activations"] = curve.total();
    fit_json["observed_span_s"] = curve.span_s();
    write_json(o, "beta_fit_" + std::to_string(i) + ".json", fit_json);
    out << "scenario " << i << ": " << describe(cfg.cell.alarms[i].correlation) << ", " << curve.total()
        << " activations over " << curve.span_s() << " s\n";
  }
}

void cmd_analyze(const Options& o, std::ostream& out) {
  const auto cfg = load(o);
  const auto geometry = place_stations(cfg.cell.n_stations, cfg.cell.radius_m, cfg.cell.geometry_seed);
  const auto activity = activity_for(cfg.cell, geometry);
  const auto& p = cfg.cell.protocol;
  const auto report = expected_costs(p, activity, cfg.cell.p_h1);
  Json j = to_json(report, p, activity);
  j["e_c_naive"] = expected_cost_naive(p, activity, cfg.cell.p_h1);
  j["max_pool_rs"] = max_pool_rs(p, cfg.mode);
  write_json(o, "analysis.json", j);
  out << "E[C] = " << report.e_c << " RS, pool duration " << report.e_c * p.rs_duration_s << " s\n";
}

void cmd_simulate(const Options& o, std::ostream& out) {
  const auto cfg = load(o);
  const auto seed = need_seed(o, "simulate");
  const std::size_t reps = o.replications.value_or(1);
  require(reps >= 1, "--replications must be at least 1");
  check_deadline_feasibility(cfg.cell.protocol, cfg.mode, cfg.cell.deadlines.tau_a_s);

  std::optional<std::ofstream> trace;
  if (cfg.trace_pools) trace.emplace(open_output(o, "pool_trace.jsonl"));
  std::optional<ScenarioStats> total;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto rep_seed = reps == 1 ? seed : mix64(seed ^ mix64(kReplicationStream + r));
    auto stats = run_scenario(cfg.cell, cfg.mode, rep_seed, trace ? &*trace : nullptr);
    if (total)
      total->merge(stats);
    else
      total = std::move(stats);
  }
  Json j = to_json(*total);
  j["mode"] = std::string(to_string(cfg.mode));
  j["replications"] = reps;
  write_json(o, "scenario_stats.json", j);
  auto hist = open_output(o, "delay_histogram.csv");
  write_csv(hist, total->delays);
  out << "mean RS per pool " << total->mean_rs_per_pool() << ", RS per station per RI "
      << total->rs_per_station_per_ri() << '\n';
}

void cmd_sweep(const Options& o, std::ostream& out) {
  auto cfg = load(o);
  std::uint64_t seed = 0;
  if (o.replications) cfg.grid.replications = *o.replications;
  if (cfg.grid.evaluation == Evaluation::Simulated) {
    seed = need_seed(o, "simulated sweep");
    if (cfg.grid.replications == 0) cfg.grid.replications = 1000;
  }
  const auto result = sweep(cfg.grid, cfg.cell, seed);
  if (o.format == "csv") {
    auto os = open_output(o, "sweep.csv");
    write_csv(os, result);
  } else {
    write_json(o, "sweep.json", to_json(result));
  }
  write_json(o, "argmin.json", to_json(result.argmin));
  out << "argmin omega " << result.argmin.omega << ", delta_c " << result.argmin.delta_c_pct << "%, E[C] "
      << result.argmin.e_c_analytical << '\n';
}

void cmd_compare(const Options& o, std::ostream& out) {
  const auto cfg = load(o);
  const auto c = compare_naive(cfg.cell, cfg.compare_omega, cfg.compare_delta_c_pct);
  if (o.format == "csv") {
    auto os = open_output(o, "naive_comparison.csv");
    write_csv(os, c);
  } else {
    write_json(o, "naive_comparison.json", to_json(c));
  }
  Json summary = to_json(c);
  summary.erase("rows");
  write_json(o, "naive_summary.json", summary);
  out << "adaptive min " << c.min_adaptive << " at omega " << c.best_omega_adaptive << ", naive min " << c.min_naive
      << " at omega " << c.best_omega_naive << ", ratio " << c.ratio << '\n';
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::InvalidArgument: return kExitInvalidArgument;
    case ErrorCategory::Config: return kExitConfig;
    case ErrorCategory::Infeasible: return kExitInfeasible;
    case ErrorCategory::Unfittable: return kExitUnfittable;
    case ErrorCategory::Io: return kExitIo;
  }
  return kExitFailure;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reservation-slot access for alarm and regular M2M traffic"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub, bool with_seed, bool with_format) {
    sub->add_option("--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory");
    if (with_seed) sub->add_option("--seed", o.seed, "RNG seed");
    if (with_format) sub->add_option("--format", o.format, "table format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* traffic = app.add_subcommand("traffic", "activation curves and Beta fits per alarm scenario");
  add_common(traffic, true, false);
  auto* analyze = app.add_subcommand("analyze", "analytical expected pool cost");
  add_common(analyze, false, false);
  auto* simulate = app.add_subcommand("simulate", "event-driven scenario run");
  add_common(simulate, true, false);
  simulate->add_option("--replications", o.replications, "independent runs to merge");
  auto* sweep_cmd = app.add_subcommand("sweep", "grid search over omega and delta_c");
  add_common(sweep_cmd, true, true);
  sweep_cmd->add_option("--replications", o.replications, "pools per grid point when simulated");
  auto* compare = app.add_subcommand("compare-naive", "adaptive against contention-free expansion");
  add_common(compare, false, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*traffic) cmd_traffic(o, out);
    else if (*analyze) cmd_analyze(o, out);
    else if (*simulate) cmd_simulate(o, out);
    else if (*sweep_cmd) cmd_sweep(o, out);
    else if (*compare) cmd_compare(o, out);
  } catch (const Error& e) {
    err << "error: " << to_string(e.category()) << ": " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace m2m
