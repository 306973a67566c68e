#include "auvgnc/telemetry_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "auvgnc/error.hpp"

namespace auvgnc {

using nlohmann::json;

namespace {

void append_number(std::string& line, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  line.append(buf, res.ptr);
}

double parse_number(std::string_view s, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    // from_chars rejects the spellings to_chars uses for non-finite values.
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorCode::kIoError, "line " + std::to_string(line_no) +
                                         ": bad number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

void write_csv(const RunLog& log, std::ostream& out) {
  std::string line;
  const auto& names = RunLog::column_names();
  for (std::size_t i = 0; i < kNumCols; ++i) {
    if (i) line += ',';
    line += names[i];
  }
  line += '\n';
  out << line;
  for (const auto& row : log.rows) {
    line.clear();
    for (std::size_t i = 0; i < kNumCols; ++i) {
      if (i) line += ',';
      append_number(line, row[i]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error(ErrorCode::kIoError, "CSV write failed");
}

void write_csv(const RunLog& log, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + file.string());
  write_csv(log, out);
}

RunLog read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kIoError, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() != kNumCols) {
    throw Error(ErrorCode::kIoError, "CSV has " + std::to_string(header.size()) +
                                         " columns, expected " + std::to_string(kNumCols));
  }
  std::array<std::size_t, kNumCols> target{};
  std::array<bool, kNumCols> seen{};
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto c = RunLog::column_index(header[i]);
    if (!c) throw Error(ErrorCode::kIoError, "unknown column '" + std::string(header[i]) + "'");
    const auto k = static_cast<std::size_t>(*c);
    if (seen[k]) throw Error(ErrorCode::kIoError, "duplicate column '" + std::string(header[i]) + "'");
    seen[k] = true;
    target[i] = k;
  }

  RunLog log;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != kNumCols) {
      throw Error(ErrorCode::kIoError, "line " + std::to_string(line_no) +
                                           ": wrong number of fields");
    }
    LogRow row{};
    for (std::size_t i = 0; i < kNumCols; ++i) row[target[i]] = parse_number(cells[i], line_no);
    log.rows.push_back(row);
  }
  return log;
}

RunLog read_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + file.string());
  return read_csv(in);
}

std::string log_to_json(const RunLog& log) {
  json j;
  j["schema_version"] = kLogSchemaVersion;
  json cols = json::array();
  for (auto n : RunLog::column_names()) cols.push_back(std::string(n));
  j["columns"] = cols;
  json rows = json::array();
  for (const auto& r : log.rows) rows.push_back(std::vector<double>(r.begin(), r.end()));
  j["rows"] = rows;
  return j.dump() + "\n";
}

std::string metrics_to_json(const Metrics& m, const std::string& scenario) {
  json j;
  j["schema_version"] = kLogSchemaVersion;
  j["scenario"] = scenario;
  j["max_overshoot_depth"] = m.max_overshoot_depth;
  j["max_overshoot_lateral"] = m.max_overshoot_lateral;
  j["max_q_error"] = m.max_q_error;
  j["max_r_error"] = m.max_r_error;
  j["envelope_violations"] = m.envelope_violations;
  j["time_to_converge"] = optional_json(m.time_to_converge);
  j["T_b_empirical"] = optional_json(m.T_b_empirical);
  j["max_pT"] = m.max_pT;
  j["t_max_pT"] = m.t_max_pT;
  j["min_pT_after_peak"] = m.min_pT_after_peak;
  j["final_pT"] = m.final_pT;
  j["max_omega_c_raw"] = m.max_omega_c_raw;
  j["t_max_omega_c_raw"] = m.t_max_omega_c_raw;
  j["max_abs_fin"] = m.max_abs_fin;
  j["max_V"] = m.max_V;
  j["max_gamma_dot"] = m.max_gamma_dot;
  j["max_omega_DT"] = m.max_omega_DT;
  j["measured_delta_omega"] = m.measured_delta_omega;
  j["final_depth"] = m.final_depth;
  j["final_lateral"] = m.final_lateral;
  j["path_complete_time"] =
      m.path_complete_time >= 0.0 ? json(m.path_complete_time) : json(nullptr);
  j["cmd_saturation_steps"] = m.cmd_saturation_steps;
  j["fin_saturation_steps"] = m.fin_saturation_steps;
  j["steps"] = m.steps;
  return j.dump(2) + "\n";
}

std::string bound_report_to_json(const BoundReport& r) {
  json j;
  j["pass"] = r.pass();
  j["samples"] = r.samples;
  j["V0"] = r.V0;
  j["started_in_domain"] = r.started_in_domain;
  j["decay_rate"] = r.decay_rate;
  j["ultimate_bound"] = r.ultimate_bound;
  j["T_b"] = optional_json(r.T_b);
  j["violations"] = r.violations;
  j["first_violation_t"] = optional_json(r.first_violation_t);
  j["max_excess"] = r.samples ? json(r.max_excess) : json(nullptr);
  j["sup_gamma_dot"] = r.sup_gamma_dot;
  j["sup_omega_DT"] = r.sup_omega_DT;
  j["omega_T_max"] = r.omega_T_max;
  j["measured_delta_omega"] = r.measured_delta_omega;
  j["measured_delta_omega_ok"] = r.measured_delta_omega_ok;
  j["constraints"] = {{"c_bound", r.constraints.c_bound},
                      {"lambda_bound", r.constraints.lambda_bound},
                      {"delta_omega_bound", r.constraints.delta_omega_bound},
                      {"c_ok", r.constraints.c_ok},
                      {"lambda_ok", r.constraints.lambda_ok},
                      {"delta_omega_ok", r.constraints.delta_omega_ok}};
  return j.dump(2) + "\n";
}

std::string sweep_to_json(const SweepResult& s, const std::string& scenario) {
  json j;
  j["scenario"] = scenario;
  j["nonincreasing"] = s.nonincreasing;
  json rows = json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"Ts", r.Ts},
                    {"max_q_error", r.max_q_error},
                    {"max_r_error", r.max_r_error},
                    {"max_overshoot_depth", r.metrics.max_overshoot_depth},
                    {"max_pT", r.metrics.max_pT}});
  }
  j["rows"] = rows;
  if (s.rows.size() > 1 && s.rows.front().max_q_error > 0.0) {
    j["reduction"] = 1.0 - s.rows.back().max_q_error / s.rows.front().max_q_error;
  }
  return j.dump(2) + "\n";
}

std::string stability_report_to_json(const StabilityReport& r) {
  json j;
  j["G_L1_norm"] = r.G_L1_norm;
  j["rho_r"] = r.rho_r;
  j["rho_1"] = r.rho_1;
  j["rho_2"] = r.rho_2;
  j["rho_ur"] = r.rho_ur;
  j["L_rho_r"] = r.L_rho_r;
  j["L0"] = r.L0;
  j["F_delta"] = r.F_delta;
  j["M_omega"] = r.M_omega;
  j["rho_0"] = r.rho_0;
  j["gamma_bar_1"] = r.gamma_bar_1;
  j["K_inf_norm"] = r.K_inf_norm;
  j["cond3_margin"] = r.cond3_margin;
  j["cond1_pass"] = r.cond1_pass;
  j["cond2_pass"] = r.cond2_pass;
  j["cond3_pass"] = r.cond3_pass;
  return j.dump(2) + "\n";
}

std::string path_report_to_json(const PathBoundsReport& r, const PathBounds& b) {
  json j;
  j["pass"] = r.pass;
  j["samples"] = r.samples;
  j["min_speed"] = r.min_speed;
  j["max_speed"] = r.max_speed;
  j["max_bending"] = r.max_bending;
  j["bounds"] = {{"v_T_min", b.v_T_min}, {"v_T_max", b.v_T_max},
                 {"omega_T_max", b.omega_T_max}};
  return j.dump(2) + "\n";
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + file.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + file.string());
}

}  // namespace auvgnc
