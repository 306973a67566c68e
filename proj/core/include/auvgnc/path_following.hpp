#pragma once

#include "auvgnc/bernstein_path.hpp"
#include "auvgnc/se3.hpp"

namespace auvgnc {

/// Vehicle state in the flow frame W (x-axis along the velocity vector).
struct FlowState {
  Vec3 p = Vec3::Zero();     // inertial CG position [m]
  Rotation3 R_WI;            // columns w1, w2, w3
  double v = 0.0;            // speed [m/s]
  Vec3 omega_W = Vec3::Zero();  // [p, q, r] [rad/s]
};

struct PFGains {
  double k_gamma = 1.0;    // [1/s]
  double k_Rtilde = 0.1;   // [1/s]
  double d = 250.0;        // characteristic distance [m]
};

struct PFParams {
  double c = 0.5;
  double c1 = 10.0;
  double lambda = 1e-5;
  double delta_lambda = 0.5;
  double delta_omega = 0.0;
  double omega_c_max = 0.1;
  double v_min = 1.0;
  double v_max = 10.0;
};

/// Attitude part of the path-following error.
struct AttitudeError {
  Rotation3 R_tilde;
  double Psi = 0.0;
  Vec2 e_R = Vec2::Zero();
};

struct PFError {
  Vec3 p_T = Vec3::Zero();
  double Psi = 0.0;
  Vec2 e_R = Vec2::Zero();
  Rotation3 R_DT;
  Rotation3 R_tilde;
  Vec3 omega_DT_D = Vec3::Zero();
};

/// p_T = (R_T^I)^T (p - p_d(gamma)).
Vec3 position_error(const FlowState& flow, const TransportFrame& frame,
                    const BernsteinPath& path);

/// R_D^T built from the cross-track error (y_T, z_T) and d > 0.
Rotation3 desired_frame(const Vec3& p_T, double d);

/// R_tilde = (R_D^T)^T R_W^T, Psi = (1 - R_tilde_11)/2,
/// e_R = [R_tilde_13, -R_tilde_12]/2.
AttitudeError attitude_error(const Rotation3& R_DT, const Rotation3& R_WT);

/// Psi evaluated in its trace form: tr[(I - Pi^T Pi)(I - R_tilde)] / 2.
double psi_trace_form(const Rotation3& R_tilde);

/// Position error dynamics:
/// -omega_T x p_T + R_W^T [v,0,0] - [|p_d'| gamma_dot, 0, 0].
Vec3 position_error_rate(const Vec3& p_T, const Rotation3& R_WT, double v,
                         const Vec3& omega_T, double path_speed,
                         double gamma_dot);

/// omega_DT^D = ((R_D^T)^T dR_D^T/dt)^vee, with dR_D^T/dt from the analytic
/// partials of R_D^T in (y_T, z_T). Throws kNonSkewInput if the product is
/// asymmetric beyond 1e-8.
Vec3 omega_DT_D(const Vec3& p_T, const Vec3& p_T_dot, double d);

/// Virtual-time rate
/// gamma_dot = [v w1 + k_gamma (p - p_d)]^T t1 / |p_d'|.
/// Throws kDegeneratePath if |p_d'| < v_T_min.
double gamma_dot(const FlowState& flow, const TransportFrame& frame,
                 const BernsteinPath& path, const PFGains& gains,
                 double v_T_min = 1e-9);

/// omega_c = Pi_R R_tilde^T (R_T^D omega_T + omega_DT^D) - 2 k_Rtilde e_R.
/// Unsaturated; see saturate_command.
Vec2 omega_command(const PFError& err, const TransportFrame& frame,
                   double gamma_dot, const PFGains& gains);

/// Scales the command to norm omega_c_max if it exceeds it. Returns true
/// when clipping happened.
bool saturate_command(Vec2& omega_c, double omega_c_max);

/// V = Psi + |p_T|^2 / c1^2.
double lyapunov_value(const PFError& err, double c1);
double lyapunov_value(double Psi, const Vec3& p_T, double c1);

/// Omega_PF membership: V <= c^2.
inline bool in_domain(double V, double c) { return V <= c * c; }

/// Evaluation of the parameter constraints on (c, lambda, delta_omega)
/// against supplied suprema.
struct PFConstraintReport {
  double c_bound = 0.0;        // min{1/sqrt2, (w_max - wT_max gd - sup wDT)/(2k)}
  double lambda_bound = 0.0;   // v_min / (c1^2 sqrt(d^2 + c^2 c1^2))
  double delta_omega_bound = 0.0;  // 2 lambda delta_lambda c
  bool c_ok = false;
  bool lambda_ok = false;
  bool delta_omega_ok = false;
  bool all_ok() const { return c_ok && lambda_ok && delta_omega_ok; }
};

PFConstraintReport check_pf_constraints(const PFParams& params,
                                        const PFGains& gains,
                                        double omega_T_max,
                                        double sup_gamma_dot,
                                        double sup_omega_DT,
                                        double delta_omega);

/// Everything the outer loop produces in one evaluation.
struct PFOutput {
  double gamma = 0.0;
  double gamma_dot = 0.0;
  PFError err;
  Vec2 omega_c = Vec2::Zero();      // after saturation
  Vec2 omega_c_raw = Vec2::Zero();  // before saturation
  bool saturated = false;
  bool path_complete = false;
  double V = 0.0;
  bool in_domain = false;
  double bending = 0.0;  // sqrt(k1^2 + k2^2)
};

/// Outer-loop state machine. Holds the transport frame and advances it to
/// the virtual time supplied on each update. One instance must not be
/// stepped from several threads at once.
class PathFollowingController {
 public:
  PathFollowingController(BernsteinPath path, PFGains gains, PFParams params);

  const BernsteinPath& path() const { return path_; }
  const PFGains& gains() const { return gains_; }
  const PFParams& params() const { return params_; }
  const TransportFrame& frame() const { return frame_; }

  /// gamma_dot at (flow, gamma), clamped so gamma stays in [0, T_f]. Uses
  /// only the analytic tangent, so it is cheap to call inside integrator
  /// stages.
  double gamma_rate(const FlowState& flow, double gamma) const;

  /// Propagates the frame to `gamma` and evaluates the full law.
  PFOutput update(const FlowState& flow, double gamma);

  /// Same law at another virtual time without moving the stored frame.
  PFOutput evaluate_at(const FlowState& flow, double gamma) const;

 private:
  PFOutput evaluate(const FlowState& flow, const TransportFrame& frame) const;

  BernsteinPath path_;
  PFGains gains_;
  PFParams params_;
  TransportFrame frame_;
};

}  // namespace auvgnc
