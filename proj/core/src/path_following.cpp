#include "auvgnc/path_following.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "auvgnc/error.hpp"

namespace auvgnc {

namespace {

struct FramePartials {
  Matrix3 R;
  Matrix3 dR_dy;
  Matrix3 dR_dz;
};

// R_D^T and its partial derivatives with respect to y_T and z_T.
FramePartials desired_frame_partials(double y, double z, double d) {
  const double n1 = std::sqrt(d * d + y * y + z * z);
  const double n2 = std::sqrt(d * d + y * y);
  const Vec3 a(d, -y, -z);
  const Vec3 b(y, d, 0.0);
  const Vec3 c1 = a / n1;
  const Vec3 c2 = b / n2;

  const double n1_3 = n1 * n1 * n1;
  const double n2_3 = n2 * n2 * n2;
  const Vec3 dc1_dy = Vec3(0.0, -1.0, 0.0) / n1 - a * (y / n1_3);
  const Vec3 dc1_dz = Vec3(0.0, 0.0, -1.0) / n1 - a * (z / n1_3);
  const Vec3 dc2_dy = Vec3(1.0, 0.0, 0.0) / n2 - b * (y / n2_3);

  FramePartials out;
  out.R.col(0) = c1;
  out.R.col(1) = c2;
  out.R.col(2) = c1.cross(c2);
  out.dR_dy.col(0) = dc1_dy;
  out.dR_dy.col(1) = dc2_dy;
  out.dR_dy.col(2) = dc1_dy.cross(c2) + c1.cross(dc2_dy);
  out.dR_dz.col(0) = dc1_dz;
  out.dR_dz.col(1) = Vec3::Zero();
  out.dR_dz.col(2) = dc1_dz.cross(c2);
  return out;
}

}  // namespace

Vec3 position_error(const FlowState& flow, const TransportFrame& frame,
                    const BernsteinPath& path) {
  return frame.R_TI.matrix().transpose() * (flow.p - path.eval(frame.gamma));
}

Rotation3 desired_frame(const Vec3& p_T, double d) {
  if (!(d > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "characteristic distance d <= 0");
  }
  const double y = p_T.y();
  const double z = p_T.z();
  const double n1 = std::sqrt(d * d + y * y + z * z);
  const double n2 = std::sqrt(d * d + y * y);
  Matrix3 r;
  r << d / n1, y / n2, d * z / (n1 * n2),
       -y / n1, d / n2, -y * z / (n1 * n2),
       -z / n1, 0.0, n2 / n1;
  return Rotation3::from_matrix(r, 1e-12);
}

AttitudeError attitude_error(const Rotation3& R_DT, const Rotation3& R_WT) {
  AttitudeError out;
  out.R_tilde = R_DT.transpose() * R_WT;
  out.Psi = 0.5 * (1.0 - out.R_tilde(0, 0));
  out.e_R = 0.5 * Vec2(out.R_tilde(0, 2), -out.R_tilde(0, 1));
  const double trace_form = psi_trace_form(out.R_tilde);
  if (std::abs(trace_form - out.Psi) > 1e-12) {
    std::ostringstream os;
    os << "Psi trace form disagrees: " << trace_form << " vs " << out.Psi;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  return out;
}

double psi_trace_form(const Rotation3& R_tilde) {
  Eigen::Matrix<double, 2, 3> pi_r;
  pi_r << 0, 1, 0,
          0, 0, 1;
  const Matrix3 proj = Matrix3::Identity() - pi_r.transpose() * pi_r;
  return 0.5 * (proj * (Matrix3::Identity() - R_tilde.matrix())).trace();
}

Vec3 position_error_rate(const Vec3& p_T, const Rotation3& R_WT, double v,
                         const Vec3& omega_T, double path_speed,
                         double gamma_dot) {
  return -omega_T.cross(p_T) + R_WT.col(0) * v -
         Vec3(path_speed * gamma_dot, 0.0, 0.0);
}

Vec3 omega_DT_D(const Vec3& p_T, const Vec3& p_T_dot, double d) {
  if (!(d > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "characteristic distance d <= 0");
  }
  const FramePartials fp = desired_frame_partials(p_T.y(), p_T.z(), d);
  const Matrix3 r_dot = fp.dR_dy * p_T_dot.y() + fp.dR_dz * p_T_dot.z();
  const Matrix3 s = fp.R.transpose() * r_dot;
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  return vee(s, 1e-8 * scale);
}

double gamma_dot(const FlowState& flow, const TransportFrame& frame,
                 const BernsteinPath& path, const PFGains& gains,
                 double v_T_min) {
  const Vec3 d1 = path.derivative(frame.gamma, 1);
  const double speed = d1.norm();
  if (!(speed >= v_T_min) || speed == 0.0) {
    std::ostringstream os;
    os << "|p_d'| = " << speed << " at gamma = " << frame.gamma;
    throw Error(ErrorCode::kDegeneratePath, os.str());
  }
  const Vec3 t1 = d1 / speed;
  const Vec3 drive =
      flow.v * flow.R_WI.col(0) + gains.k_gamma * (flow.p - path.eval(frame.gamma));
  return drive.dot(t1) / speed;
}

Vec2 omega_command(const PFError& err, const TransportFrame& frame,
                   double gamma_dot, const PFGains& gains) {
  const Vec3 w_t = omega_T(frame, gamma_dot);
  const Vec3 ff = err.R_tilde.matrix().transpose() *
                  (err.R_DT.matrix().transpose() * w_t + err.omega_DT_D);
  return Vec2(ff.y(), ff.z()) - 2.0 * gains.k_Rtilde * err.e_R;
}

bool saturate_command(Vec2& omega_c, double omega_c_max) {
  const double n = omega_c.norm();
  if (n > omega_c_max) {
    omega_c *= omega_c_max / n;
    return true;
  }
  return false;
}

double lyapunov_value(double Psi, const Vec3& p_T, double c1) {
  return Psi + p_T.squaredNorm() / (c1 * c1);
}

double lyapunov_value(const PFError& err, double c1) {
  return lyapunov_value(err.Psi, err.p_T, c1);
}

PFConstraintReport check_pf_constraints(const PFParams& params,
                                        const PFGains& gains,
                                        double omega_T_max,
                                        double sup_gamma_dot,
                                        double sup_omega_DT,
                                        double delta_omega) {
  PFConstraintReport rep;
  const double margin =
      params.omega_c_max - omega_T_max * sup_gamma_dot - sup_omega_DT;
  rep.c_bound = std::min(1.0 / std::sqrt(2.0), margin / (2.0 * gains.k_Rtilde));
  rep.c_ok = params.c1 > 0.0 && params.c > 0.0 && params.c < rep.c_bound;
  const double c1 = params.c1;
  rep.lambda_bound =
      params.v_min /
      (c1 * c1 * std::sqrt(gains.d * gains.d + params.c * params.c * c1 * c1));
  rep.lambda_ok = params.lambda > 0.0 && params.lambda < rep.lambda_bound &&
                  params.delta_lambda > 0.0 && params.delta_lambda < 1.0;
  rep.delta_omega_bound = 2.0 * params.lambda * params.delta_lambda * params.c;
  rep.delta_omega_ok = delta_omega < rep.delta_omega_bound;
  return rep;
}

PathFollowingController::PathFollowingController(BernsteinPath path,
                                                 PFGains gains,
                                                 PFParams params)
    : path_(std::move(path)),
      gains_(gains),
      params_(params),
      frame_(initial_frame(path_)) {
  if (!(gains_.k_gamma > 0.0 && gains_.k_Rtilde > 0.0 && gains_.d > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "path-following gains must be strictly positive");
  }
  if (!(params_.omega_c_max > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "omega_c_max must be positive");
  }
}

double PathFollowingController::gamma_rate(const FlowState& flow,
                                           double gamma) const {
  const double tf = path_.final_time();
  const double g = std::clamp(gamma, 0.0, tf);
  const Vec3 d1 = path_.derivative(g, 1);
  const double speed = d1.norm();
  if (!(speed > 0.0)) {
    throw Error(ErrorCode::kDegeneratePath, "zero path speed");
  }
  const Vec3 t1 = d1 / speed;
  const Vec3 drive =
      flow.v * flow.R_WI.col(0) + gains_.k_gamma * (flow.p - path_.eval(g));
  double rate = drive.dot(t1) / speed;
  if ((g >= tf && rate > 0.0) || (g <= 0.0 && rate < 0.0)) rate = 0.0;
  return rate;
}

PFOutput PathFollowingController::update(const FlowState& flow, double gamma) {
  const double g = std::clamp(gamma, 0.0, path_.final_time());
  if (g != frame_.gamma) frame_ = propagate_frame(path_, frame_, g);
  return evaluate(flow, frame_);
}

PFOutput PathFollowingController::evaluate_at(const FlowState& flow,
                                              double gamma) const {
  const double g = std::clamp(gamma, 0.0, path_.final_time());
  if (g == frame_.gamma) return evaluate(flow, frame_);
  return evaluate(flow, propagate_frame(path_, frame_, g));
}

PFOutput PathFollowingController::evaluate(const FlowState& flow,
                                           const TransportFrame& frame) const {
  const double tf = path_.final_time();
  const double g = frame.gamma;
  PFOutput out;
  out.gamma = g;
  out.bending = std::hypot(frame.k1, frame.k2);
  out.path_complete = g >= tf;

  PFError& err = out.err;
  err.p_T = position_error(flow, frame, path_);
  err.R_DT = desired_frame(err.p_T, gains_.d);
  const Rotation3 R_WT = frame.R_TI.transpose() * flow.R_WI;
  const AttitudeError att = attitude_error(err.R_DT, R_WT);
  err.R_tilde = att.R_tilde;
  err.Psi = att.Psi;
  err.e_R = att.e_R;

  out.gamma_dot = gamma_rate(flow, g);
  const double speed = path_.speed(g);
  const Vec3 w_t = omega_T(frame, out.gamma_dot);
  const Vec3 p_T_dot = position_error_rate(err.p_T, R_WT, flow.v, w_t, speed,
                                           out.gamma_dot);
  err.omega_DT_D = omega_DT_D(err.p_T, p_T_dot, gains_.d);

  out.V = lyapunov_value(err, params_.c1);
  out.in_domain = in_domain(out.V, params_.c);

  if (out.path_complete) {
    // End of path: hold a zero rate command.
    out.omega_c_raw = Vec2::Zero();
    out.omega_c = Vec2::Zero();
    return out;
  }
  out.omega_c_raw = omega_command(err, frame, out.gamma_dot, gains_);
  out.omega_c = out.omega_c_raw;
  out.saturated = saturate_command(out.omega_c, params_.omega_c_max);
  return out;
}

}  // namespace auvgnc
