#include "auvgnc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "auvgnc/bound_monitor.hpp"
#include "auvgnc/error.hpp"

namespace auvgnc {

namespace {

constexpr std::array<std::string_view, kNumCols> kColumnNames = {
    "t",        "gamma",    "gamma_dot",     "x",       "y",
    "z",        "depth",    "x_T",           "y_T",     "z_T",
    "Psi",      "V",        "in_domain",     "q_c",     "r_c",
    "q_c_raw",  "r_c_raw",  "q_m",           "r_m",     "q",
    "r",        "u_q",      "u_r",           "sigma_norm", "delta_1",
    "delta_2",  "delta_3",  "delta_4",       "delta_5", "suction_kN",
    "omega_DT_norm", "bending", "sat_cmd",   "sat_fins", "path_complete"};

std::size_t idx(Col c) { return static_cast<std::size_t>(c); }

long checked_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * std::max(1.0, r)) {
    throw Error(ErrorCode::kConfigError,
                std::string(what) + " must be an integer multiple of dt");
  }
  return static_cast<long>(n);
}

VehicleState initial_state(const ScenarioConfig& cfg) {
  const BernsteinPath& path = cfg.get_path();
  const TransportFrame f0 = initial_frame(path);
  VehicleState s;
  s.flow.p = path.eval(0.0) + f0.R_TI * cfg.initial.offset_T;
  const Rotation3 yaw = Rotation3::about_axis(Vec3::UnitZ(), cfg.initial.yaw);
  const Rotation3 pitch = Rotation3::about_axis(Vec3::UnitY(), cfg.initial.pitch);
  s.flow.R_WI = f0.R_TI * yaw * pitch;
  s.flow.v = cfg.speed;
  s.flow.omega_W = Vec3(0.0, cfg.initial.rates.x(), cfg.initial.rates.y());
  return s;
}

bool finite_state(const VehicleState& s, double gamma) {
  return s.flow.p.allFinite() && s.flow.omega_W.allFinite() &&
         s.flow.R_WI.matrix().allFinite() && std::isfinite(gamma);
}

// Desired response q_m = M(s) K_g omega_c, discretized exactly at dt for a
// command held over each step.
class ReferenceModel {
 public:
  ReferenceModel(const DesiredSystem& desired, double dt, const Vec2& y0)
      : C_(desired.sys.C),
        Ad_(expm(desired.sys.A * dt)),
        Bd_(integral_expm(desired.sys.A, dt, desired.sys.B * desired.K_g)),
        x_(right_pseudo_inverse(desired.sys.C) * Vector(y0)) {}

  Vec2 output() const { return C_ * x_; }
  void step(const Vec2& omega_c) { x_ = Ad_ * x_ + Bd_ * Vector(omega_c); }

 private:
  Matrix C_;
  Matrix Ad_;
  Matrix Bd_;
  Vector x_;
};

struct Signals {
  Vec2 omega_c = Vec2::Zero();
  Vec2 omega_c_raw = Vec2::Zero();
  bool sat_cmd = false;
  Vec2 u = Vec2::Zero();
  double sigma_norm = 0.0;
  Vec2 q_m = Vec2::Zero();
};

LogRow make_row(const VehicleState& s, const PFOutput& pf, const Signals& sig,
                double suction_kN, double delta_max) {
  LogRow row{};
  auto set = [&row](Col c, double v) { row[idx(c)] = v; };
  set(Col::t, s.t);
  set(Col::gamma, pf.gamma);
  set(Col::gamma_dot, pf.gamma_dot);
  set(Col::x, s.flow.p.x());
  set(Col::y, s.flow.p.y());
  set(Col::z, s.flow.p.z());
  set(Col::depth, s.depth());
  set(Col::x_T, pf.err.p_T.x());
  set(Col::y_T, pf.err.p_T.y());
  set(Col::z_T, pf.err.p_T.z());
  set(Col::Psi, pf.err.Psi);
  set(Col::V, pf.V);
  set(Col::in_domain, pf.in_domain ? 1.0 : 0.0);
  set(Col::q_c, sig.omega_c.x());
  set(Col::r_c, sig.omega_c.y());
  set(Col::q_c_raw, sig.omega_c_raw.x());
  set(Col::r_c_raw, sig.omega_c_raw.y());
  set(Col::q_m, sig.q_m.x());
  set(Col::r_m, sig.q_m.y());
  set(Col::q, s.flow.omega_W.y());
  set(Col::r, s.flow.omega_W.z());
  set(Col::u_q, sig.u.x());
  set(Col::u_r, sig.u.y());
  set(Col::sigma_norm, sig.sigma_norm);
  for (int i = 0; i < 5; ++i) row[idx(Col::delta_1) + i] = s.fins(i);
  set(Col::suction_kN, suction_kN);
  set(Col::omega_DT_norm, pf.err.omega_DT_D.norm());
  set(Col::bending, pf.bending);
  set(Col::sat_cmd, sig.sat_cmd ? 1.0 : 0.0);
  set(Col::sat_fins, (s.fins.cwiseAbs().maxCoeff() >= delta_max) ? 1.0 : 0.0);
  set(Col::path_complete, pf.path_complete ? 1.0 : 0.0);
  return row;
}

// Running extrema over every integration step. Overshoot is the offset
// from the virtual target's depth (lateral position) past the path, in the
// direction of the overall depth (lateral) change.
struct StepStats {
  const BernsteinPath& path;
  double sd = 1.0, sy = 1.0;
  double overshoot_depth = 0.0;
  double overshoot_lateral = 0.0;
  double q_err = 0.0, r_err = 0.0;
  double delta_omega = 0.0;
  double max_fin = 0.0;
  long fin_sat = 0;

  explicit StepStats(const BernsteinPath& p) : path(p) {
    const Vec3 a = path.eval(0.0);
    const Vec3 b = path.eval(path.final_time());
    sd = (-b.z()) >= (-a.z()) ? 1.0 : -1.0;
    sy = b.y() >= a.y() ? 1.0 : -1.0;
  }

  void add(const VehicleState& s, double gamma, const Signals& sig, double delta_max) {
    const Vec3 target = path.eval(std::clamp(gamma, 0.0, path.final_time()));
    overshoot_depth = std::max(overshoot_depth, sd * (s.depth() + target.z()));
    overshoot_lateral = std::max(overshoot_lateral, sy * (s.flow.p.y() - target.y()));
    const Vec2 rates(s.flow.omega_W.y(), s.flow.omega_W.z());
    q_err = std::max(q_err, std::abs(sig.q_m.x() - rates.x()));
    r_err = std::max(r_err, std::abs(sig.q_m.y() - rates.y()));
    delta_omega = std::max(delta_omega, (sig.omega_c - rates).norm());
    const double fin = s.fins.cwiseAbs().maxCoeff();
    max_fin = std::max(max_fin, fin);
    if (fin >= delta_max) ++fin_sat;
  }
};

void diverged(long step, const RunLog& log) {
  std::ostringstream os;
  os << "non-finite state at step " << step << " (last good log row "
     << static_cast<long>(log.size()) - 1 << ")";
  throw Error(ErrorCode::kNumericalDivergence, os.str());
}

// Kinematic loop with q = q_c + bias, r = r_c + bias integrated by RK4 with
// the law evaluated in every stage.
void run_ideal(const ScenarioConfig& cfg, double dt, long n_steps, long n_log,
               RunLog& log, StepStats& stats, Metrics& m,
               PathFollowingController& pf, const DesiredSystem& desired) {
  using State = Eigen::Matrix<double, 13, 1>;  // p, R (col-major), gamma
  VehicleState s = initial_state(cfg);
  double gamma = 0.0;
  ReferenceModel ref(desired, dt, Vec2(s.flow.omega_W.y(), s.flow.omega_W.z()));

  auto pack = [](const VehicleState& vs, double g) {
    State x;
    x.segment<3>(0) = vs.flow.p;
    x.segment<9>(3) =
        Eigen::Map<const Eigen::Matrix<double, 9, 1>>(vs.flow.R_WI.matrix().data());
    x(12) = g;
    return x;
  };
  auto flow_of = [&](const State& x) {
    FlowState f;
    f.p = x.segment<3>(0);
    f.R_WI = Rotation3::orthonormalized(Eigen::Map<const Matrix3>(x.data() + 3));
    f.v = cfg.speed;
    return f;
  };
  auto rates = [&](const State& x) {
    const FlowState f = flow_of(x);
    const PFOutput out = pf.evaluate_at(f, x(12));
    const double q = out.omega_c.x() + cfg.rate_bias.x();
    const double r = out.omega_c.y() + cfg.rate_bias.y();
    Matrix3 w;
    w << 0.0, -r, q,
         r, 0.0, 0.0,
         -q, 0.0, 0.0;
    const Matrix3 rd = f.R_WI.matrix() * w;
    State dx;
    dx.segment<3>(0) = f.R_WI.col(0) * f.v;
    dx.segment<9>(3) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(rd.data());
    dx(12) = out.gamma_dot;
    return dx;
  };

  PFOutput out = pf.update(s.flow, gamma);
  for (long k = 0;; ++k) {
    Signals sig;
    sig.omega_c = out.omega_c;
    sig.omega_c_raw = out.omega_c_raw;
    sig.sat_cmd = out.saturated;
    sig.u = out.omega_c;
    sig.q_m = ref.output();
    s.flow.omega_W = Vec3(0.0, out.omega_c.x() + cfg.rate_bias.x(),
                          out.omega_c.y() + cfg.rate_bias.y());
    stats.add(s, gamma, sig, cfg.plant.delta_max);
    if (out.saturated) ++m.cmd_saturation_steps;
    if (out.omega_c_raw.norm() > m.max_omega_c_raw) {
      m.max_omega_c_raw = out.omega_c_raw.norm();
      m.t_max_omega_c_raw = s.t;
    }
    if (out.path_complete && m.path_complete_time < 0.0) m.path_complete_time = s.t;
    if (k % n_log == 0) {
      log.rows.push_back(make_row(s, out, sig, 0.0, cfg.plant.delta_max));
      if (cfg.stop_at_path_end && out.path_complete) break;
    }
    if (k == n_steps) break;

    const State x0 = pack(s, gamma);
    const State k1 = rates(x0);
    const State k2 = rates(x0 + 0.5 * dt * k1);
    const State k3 = rates(x0 + 0.5 * dt * k2);
    const State k4 = rates(x0 + dt * k3);
    const State x1 = x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x1.allFinite()) diverged(k + 1, log);
    ref.step(out.omega_c);

    s.t = (k + 1) * dt;
    s.flow.p = x1.segment<3>(0);
    s.flow.R_WI = Rotation3::orthonormalized(Eigen::Map<const Matrix3>(x1.data() + 3));
    gamma = std::clamp(x1(12), 0.0, cfg.get_path().final_time());
    if (!finite_state(s, gamma)) diverged(k + 1, log);
    out = pf.update(s.flow, gamma);
    ++m.steps;
  }
}

void run_autopilot(const ScenarioConfig& cfg, const RunOptions& opt, double dt,
                   long n_steps, long n_log, RunLog& log, StepStats& stats,
                   Metrics& m, PathFollowingController& pf,
                   const DesiredSystem& desired) {
  const long n_tick = checked_ratio(cfg.Ts, dt, "Ts");
  VehicleState s = initial_state(cfg);
  ReferenceModel ref(desired, dt, Vec2(s.flow.omega_W.y(), s.flow.omega_W.z()));

  std::optional<L1Controller> l1;
  if (cfg.adaptation) {
    const Matrix q = cfg.l1.Q.size() > 0 ? cfg.l1.Q
                                         : Matrix::Identity(desired.n(), desired.n());
    l1.emplace(desired, cfg.l1.C.build(), q, cfg.Ts);
  }

  AuxIntegrand gamma;
  gamma.rate = [&pf](const FlowState& f, double g) { return pf.gamma_rate(f, g); };

  Signals sig;
  PFOutput out;
  for (long k = 0;; ++k) {
    const Vec2 rates(s.flow.omega_W.y(), s.flow.omega_W.z());
    if (k % n_tick == 0) {
      out = pf.update(s.flow, gamma.value);
      sig.omega_c = out.omega_c;
      sig.omega_c_raw = out.omega_c_raw;
      sig.sat_cmd = out.saturated;
      if (l1 && !opt.bypass_adaptation) {
        sig.u = l1->step(Vector(rates), Vector(out.omega_c));
        sig.sigma_norm = l1->sigma_hat().norm();
      } else if (l1) {
        sig.u = desired.K_g * Vector(out.omega_c);
        sig.sigma_norm = 0.0;
      } else {
        sig.u = out.omega_c;
      }
      if (out.saturated) ++m.cmd_saturation_steps;
      if (out.omega_c_raw.norm() > m.max_omega_c_raw) {
        m.max_omega_c_raw = out.omega_c_raw.norm();
        m.t_max_omega_c_raw = s.t;
      }
      if (out.path_complete && m.path_complete_time < 0.0) m.path_complete_time = s.t;
    }
    sig.q_m = ref.output();
    stats.add(s, gamma.value, sig, cfg.plant.delta_max);

    const double suction = cfg.disturbances.vertical_force(s.depth(), cfg.plant);
    if (k % n_log == 0) {
      const PFOutput now = (k % n_tick == 0) ? out : pf.evaluate_at(s.flow, gamma.value);
      log.rows.push_back(make_row(s, now, sig, suction, cfg.plant.delta_max));
      if (cfg.stop_at_path_end && now.path_complete) break;
    }
    if (k == n_steps) break;

    const Vec2 cmd = sig.u + cfg.disturbances.input_offset(s.t);
    const AutopilotOutput ap = autopilot_step(cmd, rates, s.autopilot, dt, cfg.plant);
    const FinVector fins = mix_fins(ap.delta_v, ap.delta_h, cfg.plant.delta_max);
    try {
      s = plant_step(s, fins, cfg.disturbances, dt, cfg.plant, &gamma);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNumericalDivergence) diverged(k + 1, log);
      throw;
    }
    s.t = (k + 1) * dt;
    s.autopilot = ap.next;
    gamma.value = std::clamp(gamma.value, 0.0, cfg.get_path().final_time());
    ref.step(sig.omega_c);
    if (!finite_state(s, gamma.value)) diverged(k + 1, log);
    ++m.steps;
  }
}

void finish_metrics(const ScenarioConfig& cfg, const RunLog& log,
                    const StepStats& stats, Metrics& m) {
  m.max_overshoot_depth = std::max(0.0, stats.overshoot_depth);
  m.max_overshoot_lateral = std::max(0.0, stats.overshoot_lateral);
  m.max_q_error = stats.q_err;
  m.max_r_error = stats.r_err;
  m.measured_delta_omega = stats.delta_omega;
  m.max_abs_fin = stats.max_fin;
  m.fin_saturation_steps = stats.fin_sat;
  if (log.size() == 0) return;

  auto pT = [&log](std::size_t i) {
    return Vec3(log.at(i, Col::x_T), log.at(i, Col::y_T), log.at(i, Col::z_T)).norm();
  };
  std::size_t peak = 0;
  std::optional<std::size_t> last_out;
  for (std::size_t i = 0; i < log.size(); ++i) {
    const double e = pT(i);
    if (e > m.max_pT && log.at(i, Col::path_complete) == 0.0) {
      m.max_pT = e;
      peak = i;
    }
    if (e > cfg.converge_tol) last_out = i;
    m.max_V = std::max(m.max_V, log.at(i, Col::V));
    m.max_gamma_dot = std::max(m.max_gamma_dot, std::abs(log.at(i, Col::gamma_dot)));
    m.max_omega_DT = std::max(m.max_omega_DT, log.at(i, Col::omega_DT_norm));
  }
  m.t_max_pT = log.at(peak, Col::t);
  m.min_pT_after_peak = m.max_pT;
  for (std::size_t i = peak; i < log.size(); ++i) {
    if (log.at(i, Col::path_complete) != 0.0) break;
    m.min_pT_after_peak = std::min(m.min_pT_after_peak, pT(i));
  }
  const std::size_t last = log.size() - 1;
  m.final_pT = pT(last);
  m.final_depth = log.at(last, Col::depth);
  m.final_lateral = log.at(last, Col::y);
  if (!last_out) {
    m.time_to_converge = log.at(0, Col::t);
  } else if (*last_out < last) {
    m.time_to_converge = log.at(*last_out + 1, Col::t);
  }

  const BoundReport b = monitor_bounds(log, cfg.pf_params, cfg.pf_gains);
  m.envelope_violations = b.violations;
  m.T_b_empirical = b.T_b;
}

}  // namespace

const std::array<std::string_view, kNumCols>& RunLog::column_names() {
  return kColumnNames;
}

std::optional<Col> RunLog::column_index(std::string_view name) {
  for (std::size_t i = 0; i < kNumCols; ++i) {
    if (kColumnNames[i] == name) return static_cast<Col>(i);
  }
  return std::nullopt;
}

std::vector<double> RunLog::series(Col c) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[idx(c)]);
  return out;
}

RunResult run(const ScenarioConfig& config, const RunOptions& options) {
  ScenarioConfig cfg = config;
  if (options.dt) cfg.dt = *options.dt;
  validate_config(cfg);

  const double dt = cfg.dt;
  const long n_steps = std::lround(cfg.duration / dt);
  if (std::abs(n_steps * dt - cfg.duration) > 1e-9 * std::max(1.0, cfg.duration)) {
    throw Error(ErrorCode::kConfigError, "duration must be an integer multiple of dt");
  }
  const long n_log = checked_ratio(cfg.log_interval, dt, "log_interval");

  const DesiredSystem desired = DesiredSystem::make(cfg.l1.M.build());
  if (desired.p() != 2) {
    throw Error(ErrorCode::kConfigError, "config.l1.M must have two outputs (q, r)");
  }
  PathFollowingController pf(cfg.get_path(), cfg.pf_gains, cfg.pf_params);

  RunResult result;
  StepStats stats(cfg.get_path());
  if (cfg.duration > 0.0) {
    if (cfg.inner_loop == InnerLoop::kIdeal) {
      run_ideal(cfg, dt, n_steps, n_log, result.log, stats, result.metrics, pf, desired);
    } else {
      run_autopilot(cfg, options, dt, n_steps, n_log, result.log, stats,
                    result.metrics, pf, desired);
    }
  }
  finish_metrics(cfg, result.log, stats, result.metrics);
  return result;
}

SweepResult ts_sweep(const ScenarioConfig& config, const std::vector<double>& ts_list) {
  if (ts_list.empty()) throw Error(ErrorCode::kConfigError, "empty Ts list");
  for (std::size_t i = 1; i < ts_list.size(); ++i) {
    if (!(ts_list[i] < ts_list[i - 1])) {
      throw Error(ErrorCode::kConfigError, "Ts list must be strictly descending");
    }
  }
  std::vector<std::future<Metrics>> jobs;
  for (double ts : ts_list) {
    ScenarioConfig cfg = config;
    cfg.Ts = ts;
    jobs.push_back(std::async(std::launch::async,
                              [cfg] { return run(cfg).metrics; }));
  }
  SweepResult out;
  for (std::size_t i = 0; i < ts_list.size(); ++i) {
    SweepRow row;
    row.Ts = ts_list[i];
    row.metrics = jobs[i].get();
    row.max_q_error = row.metrics.max_q_error;
    row.max_r_error = row.metrics.max_r_error;
    if (!out.rows.empty() && row.max_q_error > out.rows.back().max_q_error) {
      out.nonincreasing = false;
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace auvgnc
