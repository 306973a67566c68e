#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "auvgnc/scenario.hpp"

namespace auvgnc {

inline constexpr int kLogSchemaVersion = 1;

/// Fixed telemetry columns, in file order.
enum class Col : int {
  t, gamma, gamma_dot,
  x, y, z, depth,
  x_T, y_T, z_T,
  Psi, V, in_domain,
  q_c, r_c, q_c_raw, r_c_raw,
  q_m, r_m, q, r,
  u_q, u_r, sigma_norm,
  delta_1, delta_2, delta_3, delta_4, delta_5,
  suction_kN, omega_DT_norm, bending,
  sat_cmd, sat_fins, path_complete,
  kCount
};

inline constexpr std::size_t kNumCols = static_cast<std::size_t>(Col::kCount);

using LogRow = std::array<double, kNumCols>;

struct RunLog {
  std::vector<LogRow> rows;

  static const std::array<std::string_view, kNumCols>& column_names();
  static std::optional<Col> column_index(std::string_view name);

  std::size_t size() const { return rows.size(); }
  double at(std::size_t row, Col c) const {
    return rows[row][static_cast<std::size_t>(c)];
  }
  std::vector<double> series(Col c) const;
};

struct Metrics {
  double max_overshoot_depth = 0.0;    // [m]
  double max_overshoot_lateral = 0.0;  // [m]
  double max_q_error = 0.0;            // max |q_m - q| [rad/s]
  double max_r_error = 0.0;
  int envelope_violations = 0;
  std::optional<double> time_to_converge;  // [s]
  std::optional<double> T_b_empirical;     // [s]

  double max_pT = 0.0;
  double t_max_pT = 0.0;
  double min_pT_after_peak = 0.0;
  double final_pT = 0.0;
  double max_omega_c_raw = 0.0;
  double t_max_omega_c_raw = 0.0;
  double max_abs_fin = 0.0;
  double max_V = 0.0;
  double max_gamma_dot = 0.0;
  double max_omega_DT = 0.0;
  double measured_delta_omega = 0.0;  // max |omega_c - (q, r)|
  double final_depth = 0.0;
  double final_lateral = 0.0;
  double path_complete_time = -1.0;
  long cmd_saturation_steps = 0;
  long fin_saturation_steps = 0;
  long steps = 0;
};

struct RunOptions {
  // Runs the L1 controller but forces sigma_hat to zero and bypasses C(s).
  bool bypass_adaptation = false;
  // Replaces the config's dt (used by refinement checks).
  std::optional<double> dt;
};

struct RunResult {
  RunLog log;
  Metrics metrics;
};

/// Deterministic closed-loop simulation of the scenario. Throws
/// kConfigError, kDegeneratePath or kNumericalDivergence.
RunResult run(const ScenarioConfig& config, const RunOptions& options = {});

struct SweepRow {
  double Ts = 0.0;
  double max_q_error = 0.0;
  double max_r_error = 0.0;
  Metrics metrics;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  // Nonincreasing max |q_m - q| in list order (true for a single row).
  bool nonincreasing = true;
};

/// Runs the scenario once per Ts (in parallel), rows in list order.
SweepResult ts_sweep(const ScenarioConfig& config, const std::vector<double>& ts_list);

}  // namespace auvgnc
