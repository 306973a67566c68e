// Scenario runner for the path-following / L1 inner-loop simulator.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "auvgnc/bound_monitor.hpp"
#include "auvgnc/error.hpp"
#include "auvgnc/l1_analysis.hpp"
#include "auvgnc/scenario.hpp"
#include "auvgnc/simulation.hpp"
#include "auvgnc/telemetry_io.hpp"
#include "auvgnc/vehicle.hpp"

namespace fs = std::filesystem;
using namespace auvgnc;

namespace {

enum Exit : int {
  kOk = 0,
  kFailure = 1,
  kConfig = 2,
  kDiverged = 3,
  kViolation = 4,
};

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kNumericalDivergence:
      return kDiverged;
    case ErrorCode::kConfigError:
    case ErrorCode::kIoError:
    case ErrorCode::kDegeneratePath:
    case ErrorCode::kGammaOutOfRange:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kNonProperFilter:
    case ErrorCode::kNonMinimumPhaseM:
    case ErrorCode::kUnstableFilter:
    case ErrorCode::kNotHurwitz:
    case ErrorCode::kNonSpdQ:
    case ErrorCode::kSingularLambda:
    case ErrorCode::kSingularPhi:
      return kConfig;
    default:
      return kFailure;
  }
}

std::vector<double> parse_ts_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfigError, "bad Ts value '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::kConfigError, "empty --ts list");
  return out;
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void print_metrics(const std::string& name, const Metrics& m) {
  std::printf("%s: overshoot depth %.4f m, lateral %.4f m, max|q_m-q| %.3e, "
              "max|p_T| %.3f m, envelope violations %d\n",
              name.c_str(), m.max_overshoot_depth, m.max_overshoot_lateral,
              m.max_q_error, m.max_pT, m.envelope_violations);
}

int cmd_run(const std::string& config_file, const std::string& out_dir,
            const std::string& format) {
  const ScenarioConfig cfg = load_config(config_file);
  const RunResult res = run(cfg);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  if (format == "json") {
    write_text(dir / "log.json", log_to_json(res.log));
  } else {
    write_csv(res.log, dir / "log.csv");
  }
  write_text(dir / "metrics.json", metrics_to_json(res.metrics, cfg.name));
  const BoundReport b = monitor_bounds(res.log, cfg.pf_params, cfg.pf_gains);
  write_text(dir / "bounds.json", bound_report_to_json(b));
  print_metrics(cfg.name, res.metrics);
  return kOk;
}

int cmd_sweep(const std::string& config_file, const std::string& ts_text,
              const std::string& out_dir) {
  const ScenarioConfig cfg = load_config(config_file);
  const SweepResult sweep = ts_sweep(cfg, parse_ts_list(ts_text));
  std::printf("%10s %14s %14s\n", "Ts", "max|q_m-q|", "max|r_m-r|");
  for (const auto& r : sweep.rows) {
    std::printf("%10.4g %14.6e %14.6e\n", r.Ts, r.max_q_error, r.max_r_error);
  }
  if (sweep.rows.size() > 1) {
    std::printf("nonincreasing: %s\n", sweep.nonincreasing ? "yes" : "no");
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "sweep.json", sweep_to_json(sweep, cfg.name));
  }
  return kOk;
}

int cmd_check_bounds(const std::string& log_file, const std::string& params_file,
                     bool strict, double tol) {
  const RunLog log = read_csv(fs::path(log_file));
  const auto [gains, params] = pf_settings_from_json(read_file(params_file));
  const BoundReport r = monitor_bounds(log, params, gains, tol);
  std::cout << bound_report_to_json(r);
  if (!r.pass()) {
    std::fprintf(stderr, "bound check failed: %d envelope violation(s)%s\n",
                 r.violations, r.constraints.all_ok() && r.measured_delta_omega_ok
                                   ? ""
                                   : ", parameter constraints not met");
    if (strict) return kViolation;
  }
  return kOk;
}

int cmd_validate_path(const std::string& path_file, const std::string& bounds_file,
                      bool strict) {
  const BernsteinPath path = load_path_json(path_file);
  const PathBounds bounds = load_bounds_json(bounds_file);
  const PathBoundsReport r = validate_bounds(path, bounds);
  std::cout << path_report_to_json(r, bounds);
  if (!r.pass && strict) return kViolation;
  return kOk;
}

int cmd_preset(const std::string& name, const std::string& dir) {
  if (!dir.empty()) {
    const fs::path base(dir);
    fs::create_directories(base / "paths");
    for (const auto& n : preset_names()) {
      write_text(base / (n + ".json"), config_to_json(preset(n)));
    }
    for (const auto& n : preset_path_names()) {
      write_text(base / "paths" / (n + ".json"), path_to_json_text(preset_path(n)));
    }
    return kOk;
  }
  if (name.empty()) {
    for (const auto& n : preset_names()) std::cout << n << "\n";
    return kOk;
  }
  std::cout << config_to_json(preset(name));
  return kOk;
}

int cmd_stability(const std::string& config_file, double speed,
                  const UncertaintyBounds& bounds) {
  const ScenarioConfig cfg = load_config(config_file);
  const double v = speed > 0.0 ? speed : cfg.speed;
  const LtiSystem plant = linearized_plant(cfg.plant, v);
  const Matrix K = stabilizing_feedback(plant);
  const DesiredSystem desired = DesiredSystem::make(cfg.l1.M.build());
  const StabilityReport r =
      stability_check(plant, K, desired, cfg.l1.C.build(), bounds);
  std::cout << stability_report_to_json(r);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AUV path-following and L1 adaptive inner-loop simulator"};
  app.require_subcommand(1);

  std::string config_file, out_dir = ".", format = "csv";
  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario");
  run_cmd->add_option("--config", config_file, "Scenario JSON")->required();
  run_cmd->add_option("--out", out_dir, "Output directory");
  run_cmd->add_option("--format", format, "Log format")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string ts_text, sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Repeat a scenario over sampling times");
  sweep_cmd->add_option("--config", config_file, "Scenario JSON")->required();
  sweep_cmd->add_option("--ts", ts_text, "Comma-separated, descending")->required();
  sweep_cmd->add_option("--out", sweep_out, "Write sweep.json here");

  std::string log_file, params_file;
  bool strict = false;
  double tol = 1e-6;
  auto* bounds_cmd = app.add_subcommand("check-bounds", "Check a logged run against the envelope");
  bounds_cmd->add_option("--log", log_file, "Run CSV")->required();
  bounds_cmd->add_option("--params", params_file, "JSON with pf_params / pf_gains")->required();
  bounds_cmd->add_option("--tol", tol, "Absolute tolerance on V");
  bounds_cmd->add_flag("--strict", strict, "Exit 4 on any violation");

  std::string path_file, bounds_file;
  auto* path_cmd = app.add_subcommand("validate-path", "Check path speed and bending limits");
  path_cmd->add_option("--path", path_file, "Path JSON")->required();
  path_cmd->add_option("--bounds", bounds_file, "Bounds JSON")->required();
  path_cmd->add_flag("--strict", strict, "Exit 4 if the path violates the bounds");

  std::string preset_name, preset_dir;
  auto* preset_cmd = app.add_subcommand("preset", "Print or export built-in scenarios");
  preset_cmd->add_option("name", preset_name, "Preset to print");
  preset_cmd->add_option("--dir", preset_dir, "Write every preset and path here");

  double speed = 0.0;
  UncertaintyBounds ub;
  double f_delta = 0.0;
  auto* stab_cmd = app.add_subcommand("stability", "Inner-loop condition check on the linearized plant");
  stab_cmd->add_option("--config", config_file, "Scenario JSON")->required();
  stab_cmd->add_option("--speed", speed, "Linearization speed (default: scenario speed)");
  stab_cmd->add_option("--rho0", ub.rho_0);
  stab_cmd->add_option("--M-omega", ub.M_omega);
  stab_cmd->add_option("--L0", ub.L0);
  stab_cmd->add_option("--gamma-bar-1", ub.gamma_bar_1);
  stab_cmd->add_option("--F-delta", f_delta, "Constant Lipschitz bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*run_cmd) return cmd_run(config_file, out_dir, format);
    if (*sweep_cmd) return cmd_sweep(config_file, ts_text, sweep_out);
    if (*bounds_cmd) return cmd_check_bounds(log_file, params_file, strict, tol);
    if (*path_cmd) return cmd_validate_path(path_file, bounds_file, strict);
    if (*preset_cmd) return cmd_preset(preset_name, preset_dir);
    if (*stab_cmd) {
      ub.F_delta = [f_delta](double) { return f_delta; };
      return cmd_stability(config_file, speed, ub);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  }
  return kFailure;
}
