#include "auvgnc/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "auvgnc/error.hpp"

namespace auvgnc {

namespace {

const FinVector kVerticalMix = (FinVector() << -1, -1, 1, 1, 1).finished();
const FinVector kHorizontalMix = (FinVector() << 1, -1, -1, 1, 0).finished();

using PlantVector = Eigen::Matrix<double, 15, 1>;  // p, R (col-major), q, r, aux

PlantVector pack(const VehicleState& s, double aux) {
  PlantVector x;
  x.segment<3>(0) = s.flow.p;
  x.segment<9>(3) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(
      s.flow.R_WI.matrix().data());
  x(12) = s.flow.omega_W.y();
  x(13) = s.flow.omega_W.z();
  x(14) = aux;
  return x;
}

}  // namespace

double suction_force(double depth, const SuctionParams& params) {
  return params.F0_kN * std::exp(-(depth - params.depth_ref) / params.depth_scale);
}

double Disturbance::vertical_force(double depth, const PlantParams& params) const {
  return suction ? suction_force(depth, params.suction) : 0.0;
}

Vec2 Disturbance::input_offset(double t) const {
  Vec2 out = Vec2::Zero();
  for (const auto& s : steps) {
    if (s.kind == StepDisturbance::Kind::kInput && t >= s.t_on) out += s.magnitude;
  }
  return out;
}

Vec2 Disturbance::rate_offset(double t) const {
  Vec2 out = Vec2::Zero();
  for (const auto& s : steps) {
    if (s.kind == StepDisturbance::Kind::kRate && t >= s.t_on) out += s.magnitude;
  }
  return out;
}

FinVector mix_fins(double delta_v, double delta_h, double delta_max) {
  FinVector raw = kVerticalMix * delta_v + kHorizontalMix * delta_h;
  return raw.cwiseMax(-delta_max).cwiseMin(delta_max);
}

Vec2 unmix_fins(const FinVector& fins) {
  return Vec2(kVerticalMix.dot(fins) / kVerticalMix.squaredNorm(),
              kHorizontalMix.dot(fins) / kHorizontalMix.squaredNorm());
}

AutopilotOutput autopilot_step(const Vec2& cmd, const Vec2& meas,
                               const AutopilotState& state, double dt,
                               const PlantParams& params) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  const Vec2 e = cmd - meas;
  const Vec2 last = state.primed ? state.last_error : e;
  const Vec2 kp(params.K_Pv, params.K_Ph);
  const Vec2 ki(params.K_Iv, params.K_Ih);

  Vec2 integral = state.integral + 0.5 * dt * (last + e);
  Vec2 delta = kp.cwiseProduct(e) + ki.cwiseProduct(integral);

  const double lim = params.delta_max;
  const FinVector raw = kVerticalMix * delta(0) + kHorizontalMix * delta(1);
  // Channel v drives all five fins, channel h the first four.
  bool all_v = true;
  bool all_h = true;
  for (int i = 0; i < 5; ++i) {
    const bool sat = std::abs(raw(i)) >= lim;
    all_v = all_v && sat;
    if (i < 4) all_h = all_h && sat;
  }
  const bool freeze_v = all_v && e(0) * delta(0) > 0.0;
  const bool freeze_h = all_h && e(1) * delta(1) > 0.0;
  if (freeze_v) integral(0) = state.integral(0);
  if (freeze_h) integral(1) = state.integral(1);
  delta = kp.cwiseProduct(e) + ki.cwiseProduct(integral);

  AutopilotOutput out;
  out.delta_v = delta(0);
  out.delta_h = delta(1);
  out.next.integral = integral;
  out.next.last_error = e;
  out.next.primed = true;
  return out;
}

VehicleState plant_step(const VehicleState& state, const FinVector& fins,
                        const Disturbance& dist, double dt,
                        const PlantParams& params, AuxIntegrand* aux) {
  const double v = state.flow.v;
  const Vec2 eff = unmix_fins(fins);
  const double bq = params.b_q(v);
  const double br = params.b_r(v);

  auto rates = [&](double t, const PlantVector& x) {
    const Vec3 p = x.segment<3>(0);
    const Eigen::Map<const Matrix3> R(x.data() + 3);
    const double q = x(12), r = x(13);
    const double depth = -p.z();
    const double elevation_sin = R(2, 0);

    const Vec2 w_ext = dist.rate_offset(t);
    const double w_q = params.suction.lever_arm *
                           dist.vertical_force(depth, params) / params.mass_proxy +
                       w_ext(0) - params.righting * elevation_sin;
    const double w_r = w_ext(1);

    PlantVector dx;
    dx.segment<3>(0) = R.col(0) * v;
    Matrix3 omega_hat;
    omega_hat << 0.0, -r, q,
                 r, 0.0, 0.0,
                 -q, 0.0, 0.0;
    const Matrix3 r_dot = R * omega_hat;
    dx.segment<9>(3) = Eigen::Map<const Eigen::Matrix<double, 9, 1>>(r_dot.data());
    dx(12) = (-q + bq * eff(0) + w_q) / params.tau_q;
    dx(13) = (-r + br * eff(1) + w_r) / params.tau_r;
    dx(14) = 0.0;
    if (aux != nullptr && aux->rate) {
      FlowState fs;
      fs.p = p;
      fs.v = v;
      fs.omega_W = Vec3(0.0, q, r);
      bool ok = true;
      try {
        fs.R_WI = Rotation3::orthonormalized(R);
      } catch (const Error&) {
        ok = false;  // blown-up stage; reported by the finiteness check below
      }
      dx(14) = ok ? aux->rate(fs, x(14)) : std::numeric_limits<double>::quiet_NaN();
    }
    return dx;
  };

  const double t = state.t;
  const PlantVector x0 = pack(state, aux != nullptr ? aux->value : 0.0);
  const PlantVector k1 = rates(t, x0);
  const PlantVector k2 = rates(t + 0.5 * dt, x0 + 0.5 * dt * k1);
  const PlantVector k3 = rates(t + 0.5 * dt, x0 + 0.5 * dt * k2);
  const PlantVector k4 = rates(t + dt, x0 + dt * k3);
  const PlantVector x1 = x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!x1.allFinite()) {
    throw Error(ErrorCode::kNumericalDivergence,
                "non-finite plant state at t = " + std::to_string(t + dt));
  }

  VehicleState next = state;
  next.t = t + dt;
  next.fins = fins;
  next.flow.p = x1.segment<3>(0);
  next.flow.R_WI = Rotation3::orthonormalized(Eigen::Map<const Matrix3>(x1.data() + 3));
  next.flow.omega_W = Vec3(0.0, x1(12), x1(13));
  if (aux != nullptr) aux->value = x1(14);
  return next;
}

LtiSystem linearized_plant(const PlantParams& params, double v) {
  // Per channel: q' = (-q + b (K_P (u - q) + K_I xi)) / tau, xi' = u - q.
  auto channel = [](double tau, double b, double kp, double ki) {
    Matrix a(2, 2), bm(2, 1), c(1, 2);
    a << -(1.0 + b * kp) / tau, b * ki / tau,
         -1.0, 0.0;
    bm << b * kp / tau, 1.0;
    c << 1.0, 0.0;
    return LtiSystem(a, bm, c);
  };
  return block_diagonal({channel(params.tau_q, params.b_q(v), params.K_Pv, params.K_Iv),
                         channel(params.tau_r, params.b_r(v), params.K_Ph, params.K_Ih)});
}

}  // namespace auvgnc
