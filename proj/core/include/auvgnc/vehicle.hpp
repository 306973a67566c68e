#pragma once

#include <functional>
#include <vector>

#include "auvgnc/lti.hpp"
#include "auvgnc/path_following.hpp"

namespace auvgnc {

using FinVector = Eigen::Matrix<double, 5, 1>;

/// Near-surface hull suction F(depth) = F0 exp(-(depth - depth_ref) / scale).
struct SuctionParams {
  double F0_kN = 1000.0;
  double depth_ref = 15.0;   // [m]
  double depth_scale = 5.0;  // [m]
  double lever_arm = 1.0;    // [m]
};

/// Surrogate plant and autopilot constants. Depth is positive down
/// (depth = -z with the inertial z axis pointing up).
struct PlantParams {
  double tau_q = 4.0;  // [s]
  double tau_r = 4.0;
  double b0_q = 1.0 / 600.0;  // [rad/s per deg] at v_ref
  double b0_r = 1.0 / 600.0;
  double v_ref = 5.0;         // [m/s]
  double K_Pv = 3000.0;
  double K_Ph = 3000.0;
  double K_Iv = 50.0;
  double K_Ih = 50.0;
  double delta_max = 30.0;    // [deg]
  // Pitch-rate restoring term: -righting * sin(flight-path elevation).
  double righting = 0.0;      // [rad/s]
  SuctionParams suction;
  // Pitch-rate disturbance = lever_arm * F / mass_proxy.
  double mass_proxy = 400000.0;  // [kN m s]

  double b_q(double v) const { return b0_q * (v / v_ref) * (v / v_ref); }
  double b_r(double v) const { return b0_r * (v / v_ref) * (v / v_ref); }
};

/// Vertical hull force toward the surface [kN].
double suction_force(double depth, const SuctionParams& params);

/// Step added either to the autopilot input (matched with u_ad) or
/// directly to the rate dynamics.
struct StepDisturbance {
  enum class Kind { kInput, kRate };
  Kind kind = Kind::kInput;
  double t_on = 0.0;
  Vec2 magnitude = Vec2::Zero();  // [rad/s] on (q, r)
};

struct Disturbance {
  bool suction = false;
  std::vector<StepDisturbance> steps;

  double vertical_force(double depth, const PlantParams& params) const;
  Vec2 input_offset(double t) const;
  Vec2 rate_offset(double t) const;
};

struct AutopilotState {
  Vec2 integral = Vec2::Zero();    // [rad]
  Vec2 last_error = Vec2::Zero();  // [rad/s]
  bool primed = false;
};

struct VehicleState {
  double t = 0.0;
  FlowState flow;
  FinVector fins = FinVector::Zero();  // [deg]
  AutopilotState autopilot;

  double depth() const { return -flow.p.z(); }
};

/// x-configured stern planes, each clipped to +-delta_max.
FinVector mix_fins(double delta_v, double delta_h, double delta_max = 30.0);

/// Least-squares (delta_v, delta_h) recovered from a fin vector.
Vec2 unmix_fins(const FinVector& fins);

struct AutopilotOutput {
  double delta_v = 0.0;
  double delta_h = 0.0;
  AutopilotState next;
};

/// PI rate autopilot with trapezoidal integration. A channel's integrator
/// is frozen while every fin it drives is saturated and the error pushes
/// further into saturation.
AutopilotOutput autopilot_step(const Vec2& cmd, const Vec2& meas,
                               const AutopilotState& state, double dt,
                               const PlantParams& params);

/// Extra scalar integrated alongside the plant in the same RK4 stages
/// (used for the virtual time).
struct AuxIntegrand {
  double value = 0.0;
  std::function<double(const FlowState&, double)> rate;
};

/// One RK4 step of the rate dynamics and flow-frame kinematics. The fins
/// are held over the step. Throws kNumericalDivergence on a non-finite
/// result.
VehicleState plant_step(const VehicleState& state, const FinVector& fins,
                        const Disturbance& dist, double dt,
                        const PlantParams& params, AuxIntegrand* aux = nullptr);

/// Linear model from the autopilot input (u_q, u_r) to (q, r) with the PI
/// integrators as states: x = [q, int e_q, r, int e_r]. Saturation and the
/// disturbance terms are ignored.
LtiSystem linearized_plant(const PlantParams& params, double v);

}  // namespace auvgnc
