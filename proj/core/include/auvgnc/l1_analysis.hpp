#pragma once

#include <functional>
#include <vector>

#include "auvgnc/l1_adaptive.hpp"

namespace auvgnc {

/// Uncertainty description for the feasibility check.
struct UncertaintyBounds {
  double rho_0 = 1.0;        // ||x_0||_inf bound
  double M_omega = 0.1;      // ||omega_c||_Linf bound
  double L0 = 0.0;           // |f(t, 0)| bound
  double gamma_bar_1 = 1e-3;
  // Lipschitz bound F_delta of f on ||x||_inf <= delta.
  std::function<double(double)> F_delta = [](double) { return 0.0; };
};

/// H-functions of the closed inner loop, all minimal realizations.
struct InnerLoopTransfers {
  LtiSystem P;     // C_p (sI - A_p + B_p K)^{-1} B_p
  LtiSystem H0;
  LtiSystem H1;
  LtiSystem H2;
  LtiSystem H3;
  LtiSystem H4;
  LtiSystem H5;
  LtiSystem G;
  LtiSystem H_in;
};

/// Throws kNotHurwitz if A_p - B_p K is not Hurwitz.
InnerLoopTransfers build_transfers(const LtiSystem& plant, const Matrix& K,
                                   const DesiredSystem& desired,
                                   const LtiSystem& c_filter);

struct StabilityReport {
  double G_L1_norm = 0.0;
  double rho_r = 0.0;
  double rho_1 = 0.0;
  double rho_2 = 0.0;
  double rho_ur = 0.0;
  double L_rho_r = 0.0;
  double L0 = 0.0;
  double F_delta = 0.0;
  double M_omega = 0.0;
  double rho_0 = 0.0;
  double gamma_bar_1 = 0.0;
  double K_inf_norm = 0.0;
  double cond3_margin = 0.0;  // best rhs - ||G||_L1 over the rho_r grid
  bool cond1_pass = false;
  bool cond2_pass = false;
  bool cond3_pass = false;
  bool all_pass() const { return cond1_pass && cond2_pass && cond3_pass; }
};

/// Modal state feedback that moves every eigenvalue of A with real part
/// above `slow_threshold` to `target`, leaving the rest untouched. Returns
/// a zero gain if no eigenvalue is slow.
Matrix stabilizing_feedback(const LtiSystem& plant, double slow_threshold = -0.05,
                            double target = -0.1);

/// Feasibility of the inner-loop conditions. cond3 is searched over 50
/// log-spaced rho_r in (rho_0, 1e6 rho_0]; the best margin is reported.
StabilityReport stability_check(const LtiSystem& plant, const Matrix& K,
                                 const DesiredSystem& desired,
                                 const LtiSystem& c_filter,
                                 const UncertaintyBounds& bounds);

using Signal = std::function<Vector(double)>;
using Uncertainty = std::function<Vector(double, const Vector&)>;

/// Uniformly sampled trajectory (sample k at t = k dt).
struct Trajectory {
  double dt = 0.0;
  std::vector<double> t;
  std::vector<Vector> x;
  std::vector<Vector> u;
  std::vector<Vector> y;
};

/// Non-implementable reference system, integrated with RK4 at dt. The
/// uncertainty estimate sigma_ref is reconstructed from the state so that
/// y_ref = M (u_ref + sigma_ref) + free response of M from C_m^dagger y_0.
Trajectory reference_system_sim(const LtiSystem& plant, const Uncertainty& f,
                                const DesiredSystem& desired,
                                const LtiSystem& c_filter, const Signal& omega_c,
                                const Vector& x0, double dt, double T);

/// Plant driven by the sampled L1 controller (ZOH at Ts, RK4 at dt).
/// Ts must be an integer multiple of dt.
Trajectory closed_loop_sim(const LtiSystem& plant, const Uncertainty& f,
                           const DesiredSystem& desired,
                           const LtiSystem& c_filter, const Matrix& Q,
                           double Ts, const Signal& omega_c, const Vector& x0,
                           double dt, double T);

struct GapReport {
  double gamma_x = 0.0;  // sup_t ||x_ref - x||_inf
  double gamma_u = 0.0;  // sup_t ||u_ref - u_ad||_inf
};

/// Throws kMismatchedRuns unless both runs share dt, length and dimensions.
GapReport theorem2_gap(const Trajectory& closed_loop, const Trajectory& reference);

}  // namespace auvgnc
