#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "auvgnc/bernstein_path.hpp"
#include "auvgnc/l1_adaptive.hpp"
#include "auvgnc/path_following.hpp"
#include "auvgnc/vehicle.hpp"

namespace auvgnc {

inline constexpr int kConfigSchemaVersion = 1;

/// A transfer matrix given either as a diagonal of scalar transfer
/// functions or as an explicit (A, B, C) triple.
struct SystemSpec {
  std::vector<std::pair<Polynomial, Polynomial>> diag_tf;
  std::optional<LtiSystem> ss;

  LtiSystem build() const;
};

struct L1Config {
  SystemSpec M;
  SystemSpec C;
  Matrix Q;  // empty means identity
};

/// Initial vehicle pose relative to the virtual target at gamma = 0.
struct InitialCondition {
  Vec3 offset_T = Vec3::Zero();  // position offset resolved in T [m]
  double yaw = 0.0;    // about t3 (down), positive to starboard [rad]
  double pitch = 0.0;  // about t2 (starboard), positive nose up [rad]
  Vec2 rates = Vec2::Zero();  // initial (q, r) [rad/s]
};

enum class InnerLoop {
  kAutopilot,  // PI autopilot + surrogate plant (optionally with L1)
  kIdeal,      // q = q_c, r = r_c exactly (plus an optional bias)
};

struct ScenarioConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name = "scenario";
  // Preset name, file reference or "inline"; kept for round trips.
  std::string path_source = "inline";
  std::optional<BernsteinPath> path;
  std::optional<PathBounds> path_bounds;
  double speed = 5.0;
  bool adaptation = true;
  InnerLoop inner_loop = InnerLoop::kAutopilot;
  Vec2 rate_bias = Vec2::Zero();
  double Ts = 0.05;
  double dt = 0.01;
  double duration = 100.0;
  double log_interval = 1.0;
  // End the run at the first logged sample after gamma reaches T_f.
  bool stop_at_path_end = true;
  PFGains pf_gains;
  PFParams pf_params;
  L1Config l1;
  PlantParams plant;
  Disturbance disturbances;
  InitialCondition initial;
  double converge_tol = 0.5;
  std::uint64_t seed = 0;

  const BernsteinPath& get_path() const;
};

/// Default M(s), C(s) and Q = I.
L1Config default_l1_config();

/// Throws kConfigError with a message naming the offending field.
ScenarioConfig config_from_json(const std::string& text,
                                const std::filesystem::path& base_dir = {});
ScenarioConfig load_config(const std::filesystem::path& file);
std::string config_to_json(const ScenarioConfig& config);

/// Reads pf_gains and pf_params from a JSON object; other keys are
/// ignored so a full scenario config is accepted. Throws kConfigError.
std::pair<PFGains, PFParams> pf_settings_from_json(const std::string& text);

/// Checks the run-time invariants (dt <= Ts/5, Ts a multiple of dt, ...).
/// Throws kConfigError.
void validate_config(const ScenarioConfig& config);

/// Built-in scenarios: depth_change, lane_change, canyon, ideal_loop,
/// disturbance_step.
std::vector<std::string> preset_names();
ScenarioConfig preset(std::string_view name);

/// Geometry of the named preset path.
std::vector<std::string> preset_path_names();
BernsteinPath preset_path(std::string_view name);

}  // namespace auvgnc
