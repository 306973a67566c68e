#include "auvgnc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "auvgnc/error.hpp"

namespace auvgnc {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorCode::kConfigError, msg);
}

// Object reader that rejects unknown keys and reports field paths.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) config_error(where_ + " must be an object");
  }
  ~Fields() = default;

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) config_error(where_ + "." + key + " is required");
    return j_.at(key);
  }
  std::string path(const std::string& key) const { return where_ + "." + key; }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) config_error(path(key) + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) config_error(path(key) + " must be finite");
    return x;
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) config_error(path(key) + " must be true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) config_error(path(key) + " must be a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        config_error("unknown field " + where_ + "." + it.key());
      }
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array()) config_error(where + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) config_error(where + " must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Vec2 vec2(const json& v, const std::string& where) {
  const auto xs = number_list(v, where);
  if (xs.size() != 2) config_error(where + " must have 2 entries");
  return Vec2(xs[0], xs[1]);
}

Vec3 vec3(const json& v, const std::string& where) {
  const auto xs = number_list(v, where);
  if (xs.size() != 3) config_error(where + " must have 3 entries");
  return Vec3(xs[0], xs[1], xs[2]);
}

Matrix matrix(const json& v, const std::string& where) {
  if (!v.is_array()) config_error(where + " must be an array of rows");
  const auto rows = v.size();
  if (rows == 0) return Matrix(0, 0);
  std::vector<std::vector<double>> data;
  for (std::size_t i = 0; i < rows; ++i) {
    data.push_back(number_list(v[i], where + "[" + std::to_string(i) + "]"));
    if (data.back().size() != data.front().size()) {
      config_error(where + " rows must have equal length");
    }
  }
  Matrix m(rows, data.front().size());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < data[i].size(); ++k) m(i, k) = data[i][k];
  }
  return m;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

SystemSpec system_spec(const json& v, const std::string& where) {
  Fields f(v, where);
  SystemSpec spec;
  if (f.has("diag_tf")) {
    const json& list = f.at("diag_tf");
    if (!list.is_array() || list.empty()) {
      config_error(where + ".diag_tf must be a non-empty array");
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string w = where + ".diag_tf[" + std::to_string(i) + "]";
      Fields e(list[i], w);
      spec.diag_tf.emplace_back(number_list(e.at("num"), w + ".num"),
                                number_list(e.at("den"), w + ".den"));
      e.finish();
    }
  }
  if (f.has("A") || f.has("B") || f.has("C")) {
    if (!spec.diag_tf.empty()) {
      config_error(where + " takes either diag_tf or A/B/C, not both");
    }
    try {
      spec.ss = LtiSystem(matrix(f.at("A"), where + ".A"),
                          matrix(f.at("B"), where + ".B"),
                          matrix(f.at("C"), where + ".C"));
    } catch (const Error& e) {
      config_error(where + ": " + e.what());
    }
  }
  f.finish();
  if (spec.diag_tf.empty() && !spec.ss) {
    config_error(where + " needs diag_tf or A/B/C");
  }
  return spec;
}

json system_spec_json(const SystemSpec& spec) {
  json j = json::object();
  if (spec.ss) {
    j["A"] = matrix_json(spec.ss->A);
    j["B"] = matrix_json(spec.ss->B);
    j["C"] = matrix_json(spec.ss->C);
  } else {
    json list = json::array();
    for (const auto& [num, den] : spec.diag_tf) {
      list.push_back({{"num", num}, {"den", den}});
    }
    j["diag_tf"] = list;
  }
  return j;
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json path_json(const BernsteinPath& path) {
  return json::parse(path_to_json_text(path));
}

void read_pf_gains(const json& v, PFGains& out) {
  Fields g(v, "config.pf_gains");
  out.k_gamma = g.number("k_gamma", out.k_gamma);
  out.k_Rtilde = g.number("k_Rtilde", out.k_Rtilde);
  out.d = g.number("d", out.d);
  g.finish();
}

void read_pf_params(const json& v, PFParams& pp) {
  Fields g(v, "config.pf_params");
  pp.c = g.number("c", pp.c);
  pp.c1 = g.number("c1", pp.c1);
  pp.lambda = g.number("lambda", pp.lambda);
  pp.delta_lambda = g.number("delta_lambda", pp.delta_lambda);
  pp.delta_omega = g.number("delta_omega", pp.delta_omega);
  pp.omega_c_max = g.number("omega_c_max", pp.omega_c_max);
  pp.v_min = g.number("v_min", pp.v_min);
  pp.v_max = g.number("v_max", pp.v_max);
  g.finish();
}

}  // namespace

LtiSystem SystemSpec::build() const {
  if (ss) return *ss;
  try {
    return diagonal_tf(diag_tf);
  } catch (const Error& e) {
    config_error(std::string("transfer function: ") + e.what());
  }
}

const BernsteinPath& ScenarioConfig::get_path() const {
  if (!path) config_error("scenario has no path");
  return *path;
}

L1Config default_l1_config() {
  L1Config l1;
  l1.M.diag_tf = {{{0.1}, {1.0, 0.1}}, {{0.1}, {1.0, 0.1}}};
  // 0.1 / ((s+1)^2 (s+0.1)) and 0.01^3 / (s+0.01)^3.
  l1.C.diag_tf = {{{0.1}, {1.0, 2.1, 1.2, 0.1}},
                  {{1e-6}, {1.0, 0.03, 3e-4, 1e-6}}};
  l1.Q = Matrix::Identity(2, 2);
  return l1;
}

ScenarioConfig config_from_json(const std::string& text,
                                const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  ScenarioConfig cfg;
  Fields f(j, "config");
  cfg.schema_version = static_cast<int>(f.number("schema_version", kConfigSchemaVersion));
  if (cfg.schema_version != kConfigSchemaVersion) {
    config_error("unsupported schema_version " + std::to_string(cfg.schema_version));
  }
  // A preset supplies defaults for everything else.
  if (f.has("preset")) {
    const std::string name = f.string("preset", "");
    cfg = preset(name);
  }
  cfg.name = f.string("name", cfg.name);

  if (f.has("path")) {
    const json& p = f.at("path");
    if (p.is_string()) {
      cfg.path_source = p.get<std::string>();
      cfg.path = preset_path(cfg.path_source);
    } else if (p.is_object() && p.contains("file")) {
      Fields pf(p, "config.path");
      const std::string file = pf.string("file", "");
      pf.finish();
      const auto full = std::filesystem::path(file).is_absolute()
                            ? std::filesystem::path(file)
                            : base_dir / file;
      cfg.path_source = "file:" + file;
      try {
        cfg.path = load_path_json(full);
      } catch (const Error& e) {
        config_error(std::string("config.path: ") + e.what());
      }
    } else {
      cfg.path_source = "inline";
      try {
        cfg.path = path_from_json_text(p.dump());
      } catch (const Error& e) {
        config_error(std::string("config.path: ") + e.what());
      }
    }
  }
  if (f.has("path_bounds")) {
    Fields b(f.at("path_bounds"), "config.path_bounds");
    PathBounds pb;
    pb.v_T_min = b.number("v_T_min", 0.0);
    pb.v_T_max = b.number("v_T_max", 0.0);
    pb.omega_T_max = b.number("omega_T_max", 0.0);
    b.finish();
    cfg.path_bounds = pb;
  }

  cfg.speed = f.number("speed", cfg.speed);
  cfg.adaptation = f.boolean("adaptation", cfg.adaptation);
  const std::string loop = f.string(
      "inner_loop", cfg.inner_loop == InnerLoop::kIdeal ? "ideal" : "autopilot");
  if (loop == "ideal") {
    cfg.inner_loop = InnerLoop::kIdeal;
  } else if (loop == "autopilot") {
    cfg.inner_loop = InnerLoop::kAutopilot;
  } else {
    config_error("config.inner_loop must be \"autopilot\" or \"ideal\"");
  }
  if (f.has("rate_bias")) cfg.rate_bias = vec2(f.at("rate_bias"), "config.rate_bias");
  cfg.Ts = f.number("Ts", cfg.Ts);
  cfg.dt = f.number("dt", cfg.dt);
  cfg.duration = f.number("duration", cfg.duration);
  cfg.log_interval = f.number("log_interval", cfg.log_interval);
  cfg.stop_at_path_end = f.boolean("stop_at_path_end", cfg.stop_at_path_end);
  cfg.converge_tol = f.number("converge_tol", cfg.converge_tol);
  if (f.has("seed")) {
    const json& s = f.at("seed");
    if (!s.is_number_unsigned() && !s.is_number_integer()) {
      config_error("config.seed must be an integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }

  if (f.has("pf_gains")) read_pf_gains(f.at("pf_gains"), cfg.pf_gains);
  if (f.has("pf_params")) read_pf_params(f.at("pf_params"), cfg.pf_params);
  if (f.has("l1")) {
    Fields g(f.at("l1"), "config.l1");
    if (g.has("M")) cfg.l1.M = system_spec(g.at("M"), "config.l1.M");
    if (g.has("C")) cfg.l1.C = system_spec(g.at("C"), "config.l1.C");
    if (g.has("Q")) cfg.l1.Q = matrix(g.at("Q"), "config.l1.Q");
    g.finish();
  }
  if (f.has("plant")) {
    Fields g(f.at("plant"), "config.plant");
    PlantParams& pl = cfg.plant;
    pl.tau_q = g.number("tau_q", pl.tau_q);
    pl.tau_r = g.number("tau_r", pl.tau_r);
    pl.b0_q = g.number("b0_q", pl.b0_q);
    pl.b0_r = g.number("b0_r", pl.b0_r);
    pl.v_ref = g.number("v_ref", pl.v_ref);
    pl.K_Pv = g.number("K_Pv", pl.K_Pv);
    pl.K_Ph = g.number("K_Ph", pl.K_Ph);
    pl.K_Iv = g.number("K_Iv", pl.K_Iv);
    pl.K_Ih = g.number("K_Ih", pl.K_Ih);
    pl.delta_max = g.number("delta_max", pl.delta_max);
    pl.righting = g.number("righting", pl.righting);
    pl.mass_proxy = g.number("mass_proxy", pl.mass_proxy);
    if (g.has("suction")) {
      Fields s(g.at("suction"), "config.plant.suction");
      pl.suction.F0_kN = s.number("F0_kN", pl.suction.F0_kN);
      pl.suction.depth_ref = s.number("depth_ref", pl.suction.depth_ref);
      pl.suction.depth_scale = s.number("depth_scale", pl.suction.depth_scale);
      pl.suction.lever_arm = s.number("lever_arm", pl.suction.lever_arm);
      s.finish();
    }
    g.finish();
  }
  if (f.has("disturbances")) {
    Fields g(f.at("disturbances"), "config.disturbances");
    cfg.disturbances.suction = g.boolean("suction", cfg.disturbances.suction);
    if (g.has("steps")) {
      const json& steps = g.at("steps");
      if (!steps.is_array()) config_error("config.disturbances.steps must be an array");
      cfg.disturbances.steps.clear();
      for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string w = "config.disturbances.steps[" + std::to_string(i) + "]";
        Fields s(steps[i], w);
        StepDisturbance sd;
        const std::string kind = s.string("kind", "input");
        if (kind == "input") {
          sd.kind = StepDisturbance::Kind::kInput;
        } else if (kind == "rate") {
          sd.kind = StepDisturbance::Kind::kRate;
        } else {
          config_error(w + ".kind must be \"input\" or \"rate\"");
        }
        sd.t_on = s.number("t_on", 0.0);
        sd.magnitude = vec2(s.at("magnitude"), w + ".magnitude");
        s.finish();
        cfg.disturbances.steps.push_back(sd);
      }
    }
    g.finish();
  }
  if (f.has("initial")) {
    Fields g(f.at("initial"), "config.initial");
    if (g.has("offset_T")) cfg.initial.offset_T = vec3(g.at("offset_T"), "config.initial.offset_T");
    cfg.initial.yaw = g.number("yaw", cfg.initial.yaw);
    cfg.initial.pitch = g.number("pitch", cfg.initial.pitch);
    if (g.has("rates")) cfg.initial.rates = vec2(g.at("rates"), "config.initial.rates");
    g.finish();
  }
  f.finish();
  if (!cfg.path) config_error("config.path is required");
  validate_config(cfg);
  return cfg;
}

std::pair<PFGains, PFParams> pf_settings_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("parameter file must hold a JSON object");
  PFGains gains;
  PFParams params;
  // Start from the named preset when the file references one.
  if (j.contains("preset") && j["preset"].is_string()) {
    const ScenarioConfig base = preset(j["preset"].get<std::string>());
    gains = base.pf_gains;
    params = base.pf_params;
  }
  if (j.contains("pf_gains")) read_pf_gains(j["pf_gains"], gains);
  if (j.contains("pf_params")) read_pf_params(j["pf_params"], params);
  return {gains, params};
}

ScenarioConfig load_config(const std::filesystem::path& file) {
  return config_from_json(read_text(file), file.parent_path());
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["name"] = cfg.name;
  const bool named = !cfg.path_source.empty() && cfg.path_source != "inline" &&
                     cfg.path_source.rfind("file:", 0) != 0;
  if (named) {
    j["path"] = cfg.path_source;
  } else if (cfg.path) {
    j["path"] = path_json(*cfg.path);
  }
  if (cfg.path_bounds) {
    j["path_bounds"] = {{"v_T_min", cfg.path_bounds->v_T_min},
                        {"v_T_max", cfg.path_bounds->v_T_max},
                        {"omega_T_max", cfg.path_bounds->omega_T_max}};
  }
  j["speed"] = cfg.speed;
  j["adaptation"] = cfg.adaptation;
  j["inner_loop"] = cfg.inner_loop == InnerLoop::kIdeal ? "ideal" : "autopilot";
  j["rate_bias"] = {cfg.rate_bias.x(), cfg.rate_bias.y()};
  j["Ts"] = cfg.Ts;
  j["dt"] = cfg.dt;
  j["duration"] = cfg.duration;
  j["log_interval"] = cfg.log_interval;
  j["stop_at_path_end"] = cfg.stop_at_path_end;
  j["converge_tol"] = cfg.converge_tol;
  j["seed"] = cfg.seed;
  j["pf_gains"] = {{"k_gamma", cfg.pf_gains.k_gamma},
                   {"k_Rtilde", cfg.pf_gains.k_Rtilde},
                   {"d", cfg.pf_gains.d}};
  const PFParams& pp = cfg.pf_params;
  j["pf_params"] = {{"c", pp.c},
                    {"c1", pp.c1},
                    {"lambda", pp.lambda},
                    {"delta_lambda", pp.delta_lambda},
                    {"delta_omega", pp.delta_omega},
                    {"omega_c_max", pp.omega_c_max},
                    {"v_min", pp.v_min},
                    {"v_max", pp.v_max}};
  j["l1"] = {{"M", system_spec_json(cfg.l1.M)},
             {"C", system_spec_json(cfg.l1.C)}};
  if (cfg.l1.Q.size() > 0) j["l1"]["Q"] = matrix_json(cfg.l1.Q);
  const PlantParams& pl = cfg.plant;
  j["plant"] = {{"tau_q", pl.tau_q},
                {"tau_r", pl.tau_r},
                {"b0_q", pl.b0_q},
                {"b0_r", pl.b0_r},
                {"v_ref", pl.v_ref},
                {"K_Pv", pl.K_Pv},
                {"K_Ph", pl.K_Ph},
                {"K_Iv", pl.K_Iv},
                {"K_Ih", pl.K_Ih},
                {"delta_max", pl.delta_max},
                {"righting", pl.righting},
                {"mass_proxy", pl.mass_proxy},
                {"suction",
                 {{"F0_kN", pl.suction.F0_kN},
                  {"depth_ref", pl.suction.depth_ref},
                  {"depth_scale", pl.suction.depth_scale},
                  {"lever_arm", pl.suction.lever_arm}}}};
  json steps = json::array();
  for (const auto& s : cfg.disturbances.steps) {
    steps.push_back({{"kind", s.kind == StepDisturbance::Kind::kRate ? "rate" : "input"},
                     {"t_on", s.t_on},
                     {"magnitude", {s.magnitude.x(), s.magnitude.y()}}});
  }
  j["disturbances"] = {{"suction", cfg.disturbances.suction}, {"steps", steps}};
  j["initial"] = {{"offset_T", {cfg.initial.offset_T.x(), cfg.initial.offset_T.y(),
                                cfg.initial.offset_T.z()}},
                  {"yaw", cfg.initial.yaw},
                  {"pitch", cfg.initial.pitch},
                  {"rates", {cfg.initial.rates.x(), cfg.initial.rates.y()}}};
  return j.dump(2) + "\n";
}

void validate_config(const ScenarioConfig& cfg) {
  if (!cfg.path) config_error("config.path is required");
  if (!(cfg.dt > 0.0)) config_error("config.dt must be positive");
  if (!(cfg.Ts > 0.0)) config_error("config.Ts must be positive");
  if (!(cfg.duration >= 0.0)) config_error("config.duration must be >= 0");
  if (!(cfg.log_interval > 0.0)) config_error("config.log_interval must be positive");
  if (cfg.inner_loop == InnerLoop::kAutopilot) {
    if (cfg.dt > cfg.Ts / 5.0 * (1.0 + 1e-12)) {
      config_error("config.dt must not exceed Ts/5");
    }
    const double ratio = cfg.Ts / cfg.dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
      config_error("config.Ts must be an integer multiple of dt");
    }
  }
  if (!(cfg.speed > 0.0)) config_error("config.speed must be positive");
  const PFGains& g = cfg.pf_gains;
  if (!(g.k_gamma > 0.0 && g.k_Rtilde > 0.0 && g.d > 0.0)) {
    config_error("config.pf_gains must be strictly positive");
  }
  const PFParams& p = cfg.pf_params;
  if (!(p.c1 > 0.0 && p.lambda > 0.0 && p.omega_c_max > 0.0)) {
    config_error("config.pf_params: c1, lambda, omega_c_max must be positive");
  }
  if (!(p.delta_lambda > 0.0 && p.delta_lambda < 1.0)) {
    config_error("config.pf_params.delta_lambda must lie in (0, 1)");
  }
  if (!(p.delta_omega >= 0.0)) config_error("config.pf_params.delta_omega must be >= 0");
  const PlantParams& pl = cfg.plant;
  if (!(pl.tau_q > 0.0 && pl.tau_r > 0.0)) config_error("config.plant lags must be positive");
  if (!(pl.delta_max > 0.0)) config_error("config.plant.delta_max must be positive");
  if (!(pl.v_ref > 0.0 && pl.mass_proxy > 0.0)) {
    config_error("config.plant.v_ref and mass_proxy must be positive");
  }
  if (!(pl.suction.depth_scale > 0.0)) {
    config_error("config.plant.suction.depth_scale must be positive");
  }
  const int n = [&] {
    try {
      return cfg.l1.M.build().n();
    } catch (const Error& e) {
      config_error(std::string("config.l1.M: ") + e.what());
    }
  }();
  if (cfg.l1.Q.size() > 0 && (cfg.l1.Q.rows() != n || cfg.l1.Q.cols() != n)) {
    config_error("config.l1.Q must be n_m x n_m");
  }
  if (cfg.path_bounds) {
    const PathBounds& b = *cfg.path_bounds;
    if (!(b.v_T_min > 0.0 && b.v_T_min <= b.v_T_max && b.omega_T_max > 0.0)) {
      config_error("config.path_bounds need 0 < v_T_min <= v_T_max, omega_T_max > 0");
    }
  }
}

// ---------------------------------------------------------------------------
// Presets. Control points are reconstructions of the described maneuvers
// (endpoints and character), not published coefficients.

std::vector<std::string> preset_path_names() {
  return {"depth_change", "lane_change", "canyon"};
}

BernsteinPath preset_path(std::string_view name) {
  auto uniform_x = [](double length, int degree) {
    std::vector<double> xs;
    for (int j = 0; j <= degree; ++j) xs.push_back(length * j / degree);
    return xs;
  };
  if (name == "depth_change") {
    // Smooth 50 m -> 45 m depth step over 1 km of track.
    const auto xs = uniform_x(1000.0, 5);
    const double depth[] = {50, 50, 45, 45, 45, 45};
    std::vector<Vec3> pts;
    for (int j = 0; j <= 5; ++j) pts.emplace_back(xs[j], 0.0, -depth[j]);
    return BernsteinPath(std::move(pts), 200.0);
  }
  if (name == "lane_change") {
    // 50 m -> 15 m depth with a simultaneous 35 m lateral shift.
    const auto xs = uniform_x(3000.0, 5);
    const double depth[] = {50, 50, 50, 15, 15, 15};
    const double lateral[] = {0, 0, 0, 35, 35, 35};
    std::vector<Vec3> pts;
    for (int j = 0; j <= 5; ++j) pts.emplace_back(xs[j], lateral[j], -depth[j]);
    return BernsteinPath(std::move(pts), 1500.0);
  }
  if (name == "canyon") {
    // Corridor with one sharp horizontal turn and a gentle descent.
    std::vector<Vec3> pts = {{0, 0, -60},    {1200, 0, -60}, {1200, 0, -62},
                             {1200, 0, -63}, {1200, 0, -64}, {1200, 1600, -65}};
    return BernsteinPath(std::move(pts), 550.0);
  }
  throw Error(ErrorCode::kConfigError, "unknown path preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  return {"depth_change", "lane_change", "canyon", "ideal_loop", "disturbance_step"};
}

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig cfg;
  cfg.name = std::string(name);
  cfg.l1 = default_l1_config();
  cfg.pf_gains = PFGains{1.0, 0.1, 250.0};
  cfg.plant.righting = 0.1;
  cfg.dt = 0.01;
  cfg.Ts = 0.05;

  if (name == "depth_change") {
    cfg.path_source = "depth_change";
    cfg.path = preset_path(cfg.path_source);
    cfg.speed = 5.0;
    cfg.duration = 300.0;
    cfg.log_interval = 0.5;
    return cfg;
  }
  if (name == "lane_change") {
    cfg.path_source = "lane_change";
    cfg.path = preset_path(cfg.path_source);
    cfg.speed = 2.0;
    cfg.duration = 2000.0;
    cfg.log_interval = 1.0;
    cfg.disturbances.suction = true;
    return cfg;
  }
  if (name == "canyon") {
    cfg.path_source = "canyon";
    cfg.path = preset_path(cfg.path_source);
    cfg.speed = 5.0;
    cfg.duration = 700.0;
    cfg.log_interval = 0.5;
    cfg.pf_params.omega_c_max = 0.15;
    return cfg;
  }
  if (name == "ideal_loop") {
    cfg.path_source = "depth_change";
    cfg.path = preset_path(cfg.path_source);
    cfg.inner_loop = InnerLoop::kIdeal;
    cfg.adaptation = false;
    cfg.speed = 2.0;
    cfg.duration = 150.0;
    cfg.log_interval = 0.1;
    cfg.pf_gains = PFGains{1.0, 1.0, 250.0};
    cfg.pf_params.c = 0.5;
    cfg.pf_params.c1 = 20.0;
    cfg.pf_params.lambda = 1e-5;
    cfg.pf_params.delta_lambda = 0.5;
    cfg.pf_params.omega_c_max = 2.0;
    cfg.pf_params.v_min = 2.0;
    cfg.pf_params.v_max = 2.0;
    // 5 m to starboard, heading back toward the path: Psi(0) = 1/16 and
    // |p_T|^2 / c1^2 = 1/16, so V(0) = c^2 / 2.
    cfg.initial.offset_T = Vec3(0.0, 5.0, 0.0);
    cfg.initial.yaw = -(std::atan2(5.0, 250.0) + std::acos(0.875));
    return cfg;
  }
  if (name == "disturbance_step") {
    cfg.path_source = "depth_change";
    cfg.path = preset_path(cfg.path_source);
    cfg.speed = 5.0;
    cfg.duration = 150.0;
    cfg.log_interval = 0.5;
    cfg.dt = 0.001;
    StepDisturbance step;
    step.kind = StepDisturbance::Kind::kInput;
    step.t_on = 100.0;
    step.magnitude = Vec2(0.005, 0.0);
    cfg.disturbances.steps.push_back(step);
    return cfg;
  }
  throw Error(ErrorCode::kConfigError, "unknown preset '" + std::string(name) + "'");
}

}  // namespace auvgnc
