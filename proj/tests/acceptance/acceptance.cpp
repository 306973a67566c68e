// Acceptance criteria. One PASS/FAIL line per criterion; exit status is
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "auvgnc/bernstein_path.hpp"
#include "auvgnc/bound_monitor.hpp"
#include "auvgnc/l1_adaptive.hpp"
#include "auvgnc/scenario.hpp"
#include "auvgnc/se3.hpp"
#include "auvgnc/simulation.hpp"
#include "auvgnc/telemetry_io.hpp"
#include "json_schema.hpp"
#include "oracles.hpp"

using namespace auvgnc;

namespace {

namespace tol {
constexpr double kTrace = 1e-12;
constexpr double kDcGain = 1e-12;
constexpr double kOrthonormality = 1e-6;
constexpr double kStraightBending = 1e-10;
constexpr double kOmegaTNorm = 1e-15;  // relative
constexpr double kPhi = 1e-8;          // relative
constexpr double kL1Norm = 1e-6;
constexpr double kEnvelopeV = 1e-6;
constexpr double kTsReduction = 0.9;
constexpr double kSmallOvershoot = 0.5;  // [m]
constexpr double kOvershootRatio = 2.0;
constexpr double kLateralAgreement = 0.05;
constexpr double kLaneLateral = 35.0;  // [m]
constexpr double kAuthority = 0.05;    // [rad/s]
constexpr double kPeakWindow = 60.0;   // [s] between command and error peaks
constexpr double kReconverge = 0.1;
}  // namespace tol

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Detail {
 public:
  template <typename... Args>
  void add(const char* fmt, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    if (!text_.empty()) text_ += "; ";
    text_ += buf;
  }
  std::string str() const { return text_; }

 private:
  std::string text_;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool pass = out.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s [%2d] %s (%.1f s of %.0f s): %s%s\n", pass ? "PASS" : "FAIL", id, name, secs,
              budget_s, out.detail.c_str(), in_time ? "" : "; over time budget");
  std::fflush(stdout);
}

std::string csv_text(const RunLog& log) {
  std::ostringstream os;
  write_csv(log, os);
  return os.str();
}

Outcome algebra() {
  std::mt19937_64 rng(20241);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  bool round_trip = true;
  double worst_trace = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Vec3 xi(u(rng), u(rng), u(rng));
    round_trip = round_trip && vee(hat(xi)) == xi;
    Matrix3 t;
    for (int k = 0; k < 9; ++k) t(k / 3, k % 3) = u(rng);
    const auto [lhs, rhs] = trace_identity_check(xi, t);
    worst_trace = std::max(worst_trace, std::abs(lhs - rhs) / (1.0 + t.norm()));
  }
  double worst_dc = 0.0;
  const auto nominal = DesiredSystem::make(default_l1_config().M.build());
  worst_dc = (-nominal.sys.C * nominal.sys.A.inverse() * nominal.sys.B * nominal.K_g -
              Matrix::Identity(2, 2)).cwiseAbs().maxCoeff();
  for (int i = 0; i < 100; ++i) {
    const int n = 2 + i % 5;
    Matrix b = Matrix::Random(n, 2), c = Matrix::Random(2, n);
    b.topRows(2) += 2.0 * Matrix::Identity(2, 2);
    c.leftCols(2) += 2.0 * Matrix::Identity(2, 2);
    const auto d = DesiredSystem::make(LtiSystem(oracle::random_stable(n, rng, 0.3, 4.0), b, c));
    const Matrix m0 = -d.sys.C * d.sys.A.inverse() * d.sys.B;
    worst_dc = std::max(worst_dc, (m0 * d.K_g - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff());
  }
  Outcome o;
  o.pass = round_trip && worst_trace <= tol::kTrace && worst_dc <= tol::kDcGain;
  Detail d;
  d.add("hat/vee exact %s", round_trip ? "yes" : "no");
  d.add("trace identity %.2e", worst_trace);
  d.add("M(0)K_g - I %.2e", worst_dc);
  o.detail = d.str();
  return o;
}

Outcome geometry() {
  const auto canyon = preset_path("canyon");
  const auto f = propagate_frame(canyon, initial_frame(canyon), canyon.final_time(), 1e-9, 1e-5);
  const double drift = f.R_TI.orthonormality_error();

  const BernsteinPath line({Vec3(0, 0, 0), Vec3(3, 4, -1), Vec3(6, 8, -2)}, 5.0);
  auto lf = initial_frame(line);
  double straight = 0.0;
  for (int i = 1; i <= 100; ++i) {
    lf = propagate_frame(line, lf, 0.05 * i);
    straight = std::max({straight, std::abs(lf.k1), std::abs(lf.k2)});
  }

  double norm_err = 0.0;
  auto cf = initial_frame(canyon);
  for (int i = 1; i <= 1000; ++i) {
    cf = propagate_frame(canyon, cf, canyon.final_time() * i / 1000.0);
    const double gd = 0.5 + 0.001 * i;
    const double want = std::sqrt(cf.k1 * cf.k1 + cf.k2 * cf.k2) * std::abs(gd);
    if (want > 0.0) norm_err = std::max(norm_err, std::abs(omega_T(cf, gd).norm() - want) / want);
  }
  Outcome o;
  o.pass = drift <= tol::kOrthonormality && straight <= tol::kStraightBending &&
           norm_err <= tol::kOmegaTNorm;
  Detail d;
  d.add("drift %.2e over 1e5 substeps", drift);
  d.add("straight k %.1e", straight);
  d.add("|omega_T| rel err %.1e", norm_err);
  o.detail = d.str();
  return o;
}

Outcome phi_quadrature() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int n = 2 + i % 5;
    Matrix b = Matrix::Random(n, 2), c = Matrix::Random(2, n);
    b.topRows(2) += 2.0 * Matrix::Identity(2, 2);
    c.leftCols(2) += 2.0 * Matrix::Identity(2, 2);
    const auto d = DesiredSystem::make(LtiSystem(oracle::random_stable(n, rng, 0.3, 4.0), b, c));
    const double ts = 0.05;
    const auto g = build_gains(d, Matrix::Identity(n, n), ts);
    const Matrix abar = g.Lambda * d.sys.A * g.Lambda.inverse();
    const Matrix ref = oracle::trapezoid(
        [&](double s) -> Matrix { return oracle::expm_taylor(abar * (ts - s)) * g.Lambda; }, ts,
        10000);
    worst = std::max(worst, (g.Phi - ref).norm() / ref.norm());
  }
  Outcome o;
  o.pass = worst <= tol::kPhi;
  Detail d;
  d.add("max relative error %.2e over 20 systems", worst);
  o.detail = d.str();
  return o;
}

Outcome l1_norms() {
  double worst = 0.0;
  for (double a : {0.1, 1.0, 10.0}) {
    worst = std::max(worst, std::abs(l1_norm(tf_to_ss({1.0}, {1.0, a})) - 1.0 / a));
  }
  const auto diag = block_diagonal({tf_to_ss({1.0}, {1.0, 0.1}), tf_to_ss({1.0}, {1.0, 1.0}),
                                    tf_to_ss({2.0}, {1.0, 4.0})});
  const double mimo = l1_norm(diag);
  const double mimo_err = std::abs(mimo - 10.0);
  Outcome o;
  o.pass = worst <= tol::kL1Norm && mimo_err <= tol::kL1Norm;
  Detail d;
  d.add("max |norm - 1/a| %.2e", worst);
  d.add("diag MIMO %.9f (max channel 10)", mimo);
  o.detail = d.str();
  return o;
}

Outcome envelope() {
  const auto cfg = preset("ideal_loop");
  const auto res = run(cfg);
  const auto rep = monitor_bounds(res.log, cfg.pf_params, cfg.pf_gains, tol::kEnvelopeV);
  const double v0 = res.log.at(0, Col::V);
  Outcome o;
  o.pass = rep.violations == 0 && std::abs(v0 - 0.5 * cfg.pf_params.c * cfg.pf_params.c) < 1e-9 &&
           rep.constraints.all_ok() && rep.samples > 0;
  Detail d;
  d.add("V(0) %.6f", v0);
  d.add("%zu samples", rep.samples);
  d.add("%d violations", rep.violations);
  d.add("max excess %.2e", rep.max_excess);
  d.add("constraints %s", rep.constraints.all_ok() ? "ok" : "not met");
  o.detail = d.str();
  return o;
}

Outcome ts_trend() {
  const auto sweep = ts_sweep(preset("disturbance_step"), {0.05, 0.02, 0.01, 0.005});
  const double first = sweep.rows.front().max_q_error;
  const double last = sweep.rows.back().max_q_error;
  Outcome o;
  o.pass = sweep.nonincreasing && last <= tol::kTsReduction * first;
  Detail d;
  for (const auto& r : sweep.rows) d.add("Ts %.3f: %.4e", r.Ts, r.max_q_error);
  d.add("nonincreasing %s", sweep.nonincreasing ? "yes" : "no");
  d.add("ratio %.4f (need <= %.2f)", last / first, tol::kTsReduction);
  o.detail = d.str();
  return o;
}

Metrics run_metrics(ScenarioConfig cfg) { return run(cfg).metrics; }

Outcome depth_ordering() {
  auto make = [](double v, bool adapt) {
    auto cfg = preset("depth_change");
    cfg.speed = v;
    cfg.adaptation = adapt;
    cfg.duration = 800.0;
    return cfg;
  };
  auto a2 = std::async(std::launch::async, run_metrics, make(2.0, true));
  auto n2 = std::async(std::launch::async, run_metrics, make(2.0, false));
  auto a5 = std::async(std::launch::async, run_metrics, make(5.0, true));
  auto n5 = std::async(std::launch::async, run_metrics, make(5.0, false));
  const double ad2 = a2.get().max_overshoot_depth, na2 = n2.get().max_overshoot_depth;
  const double ad5 = a5.get().max_overshoot_depth, na5 = n5.get().max_overshoot_depth;
  auto within = [](double x, double y) {
    return std::max(x, y) <= tol::kOvershootRatio * std::min(x, y);
  };
  Outcome o;
  o.pass = ad2 < na2 && ad5 < tol::kSmallOvershoot && na5 < tol::kSmallOvershoot &&
           within(ad5, na5) && within(ad2, ad5);
  Detail d;
  d.add("2 m/s adaptive %.4f m vs off %.4f m", ad2, na2);
  d.add("5 m/s adaptive %.4f m vs off %.4f m", ad5, na5);
  o.detail = d.str();
  return o;
}

Outcome lane_change() {
  auto make = [](bool adapt) {
    auto cfg = preset("lane_change");
    cfg.adaptation = adapt;
    return cfg;
  };
  auto fa = std::async(std::launch::async, [&] { return run(make(true)); });
  auto fn = std::async(std::launch::async, [&] { return run(make(false)); });
  const auto ad = fa.get();
  const auto na = fn.get();
  const PlantParams pp;
  const double f50 = suction_force(50.0, pp.suction), f15 = suction_force(15.0, pp.suction);
  const std::size_t n = std::min(ad.log.size(), na.log.size());
  double lateral = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lateral = std::max(lateral, std::abs(ad.log.at(i, Col::y) - na.log.at(i, Col::y)));
  }
  const double limit = tol::kLateralAgreement * tol::kLaneLateral;
  Outcome o;
  o.pass = f50 < 1.0 && std::abs(f15 - 1000.0) < 1e-9 &&
           ad.metrics.max_overshoot_depth < na.metrics.max_overshoot_depth && n > 0 &&
           lateral <= limit;
  Detail d;
  d.add("F(50) %.3f kN, F(15) %.1f kN", f50, f15);
  d.add("depth overshoot adaptive %.3f m vs off %.3f m", ad.metrics.max_overshoot_depth,
        na.metrics.max_overshoot_depth);
  d.add("max lateral gap %.3f m (limit %.2f)", lateral, limit);
  o.detail = d.str();
  return o;
}

Outcome canyon() {
  const auto m = run(preset("canyon")).metrics;
  const bool exceeds = m.max_omega_c_raw > tol::kAuthority;
  const bool at_turn = std::abs(m.t_max_pT - m.t_max_omega_c_raw) <= tol::kPeakWindow;
  const bool back = m.min_pT_after_peak < tol::kReconverge * m.max_pT && m.path_complete_time > 0.0;
  Outcome o;
  o.pass = exceeds && at_turn && back;
  Detail d;
  d.add("max |omega_c| %.3f rad/s at t=%.1f", m.max_omega_c_raw, m.t_max_omega_c_raw);
  d.add("max |p_T| %.2f m at t=%.1f", m.max_pT, m.t_max_pT);
  d.add("min after peak %.3f m", m.min_pT_after_peak);
  d.add("path end t=%.1f", m.path_complete_time);
  o.detail = d.str();
  return o;
}

Outcome formats() {
  auto cfg = preset("depth_change");
  cfg.duration = 120.0;
  const auto a = run(cfg);
  const auto b = run(cfg);
  const std::string ca = csv_text(a.log), cb = csv_text(b.log);
  std::istringstream in(ca);
  const RunLog back = read_csv(in);
  bool lossless = back.size() == a.log.size();
  for (std::size_t i = 0; lossless && i < back.size(); ++i) {
    lossless = std::memcmp(back.rows[i].data(), a.log.rows[i].data(), sizeof(LogRow)) == 0;
  }
  std::ifstream sf(std::filesystem::path(AUVGNC_SOURCE_DIR) / "schema" / "metrics.schema.json");
  const auto schema = nlohmann::json::parse(sf);
  const auto errors =
      schema::validate(nlohmann::json::parse(metrics_to_json(a.metrics, cfg.name)), schema);
  Outcome o;
  o.pass = ca == cb && lossless && errors.empty();
  Detail d;
  d.add("repeat CSV identical %s (%zu bytes)", ca == cb ? "yes" : "no", ca.size());
  d.add("round trip lossless %s", lossless ? "yes" : "no");
  d.add("schema errors %zu", errors.size());
  o.detail = d.str();
  return o;
}

}  // namespace

int main() {
  criterion(1, "algebraic identities", 5.0, algebra);
  criterion(2, "transport-frame geometry", 10.0, geometry);
  criterion(3, "Phi(Ts) vs quadrature", 30.0, phi_quadrature);
  criterion(4, "L1 norm", 10.0, l1_norms);
  criterion(5, "Lyapunov envelope, ideal inner loop", 30.0, envelope);
  criterion(6, "Ts sweep trend", 120.0, ts_trend);
  criterion(7, "depth-change ordering", 60.0, depth_ordering);
  criterion(8, "lane change under suction", 120.0, lane_change);
  criterion(9, "canyon reconvergence", 120.0, canyon);
  criterion(10, "determinism and formats", 30.0, formats);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
