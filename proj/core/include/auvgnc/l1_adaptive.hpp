#pragma once

#include <utility>
#include <vector>

#include "auvgnc/lti.hpp"

namespace auvgnc {

/// Desired closed-loop dynamics M(s) = C_m (sI - A_m)^{-1} B_m together
/// with the static precompensator K_g = -(C_m A_m^{-1} B_m)^{-1}, so that
/// M(0) K_g = I.
struct DesiredSystem {
  LtiSystem sys;
  Matrix K_g;

  /// Throws kNotHurwitz, or kInvalidArgument when M is not square, not
  /// strictly proper, or C_m B_m / C_m A_m^{-1} B_m is singular.
  static DesiredSystem make(LtiSystem m);

  int n() const { return sys.n(); }
  int p() const { return sys.p(); }
};

/// Diagonal transfer matrix diag(num_i / den_i) in observable canonical
/// form per channel.
LtiSystem diagonal_tf(const std::vector<std::pair<Polynomial, Polynomial>>& entries);

/// Everything that depends only on (M, Q, Ts).
struct L1Gains {
  double Ts = 0.0;
  Matrix P;        // A_m^T P + P A_m = -Q
  Matrix sqrtP;
  Matrix D;        // (n_m - p) x n_m, D (C_m sqrtP^{-1})^T = 0
  Matrix Lambda;   // [C_m; D sqrtP]
  Matrix Phi;      // int_0^Ts e^{Lambda A_m Lambda^{-1} s} Lambda ds
  Matrix adapt;    // -Phi^{-1} e^{Lambda A_m Lambda^{-1} Ts} 1_{n_m,p}
  Matrix Am_exp;   // e^{A_m Ts}
  Matrix Am_int;   // int_0^Ts e^{A_m s} ds
  Matrix Am_exp_neg;  // e^{-A_m Ts}
  Matrix Cm_pinv;
};

/// Throws kNonSpdQ, kSingularLambda, kSingularPhi, kInvalidArgument (Ts).
L1Gains build_gains(const DesiredSystem& desired, const Matrix& Q, double Ts);

/// sigma_hat = adapt * (y_hat - y).
Vector adaptation_step(const L1Gains& gains, const Vector& y_hat,
                       const Vector& y);

/// x_hat[i+1] = e^{A_m Ts} x_hat + int e^{A_m s} ds (B_m u + sigma_hat).
Vector predictor_step(const DesiredSystem& desired, const L1Gains& gains,
                      const Vector& x_hat, const Vector& u,
                      const Vector& sigma_hat);

/// O(s) = C(s) M(s)^{-1} C_m (sI - A_m)^{-1}, minimal. Throws
/// kNonProperFilter (C not strictly proper or not square),
/// kInvalidArgument (C(0) != I), kNonMinimumPhaseM, kUnstableFilter.
LtiSystem build_filter(const DesiredSystem& desired, const LtiSystem& c_filter);

/// Exact ZOH discretization of the filter driven by e^{-A_m Ts} sigma_hat.
struct FilterDiscretization {
  Matrix Ao_exp;  // e^{A_o Ts}
  Matrix G;       // int_0^Ts e^{A_o s} ds B_o e^{-A_m Ts}
  Matrix Co;
};

FilterDiscretization discretize_filter(const LtiSystem& filter,
                                       const L1Gains& gains);

struct ControlOutput {
  Vector u;
  Vector x_u_next;
};

/// u = K_g omega_c - C_o x_u; x_u advanced one sample with sigma_hat.
ControlOutput control_step(const DesiredSystem& desired,
                           const FilterDiscretization& filter,
                           const Vector& x_u, const Vector& omega_c,
                           const Vector& sigma_hat);

/// Piecewise-constant L1 inner loop, one call per sample period.
/// Not thread-safe; owns its predictor and filter state.
class L1Controller {
 public:
  L1Controller(DesiredSystem desired, const LtiSystem& c_filter,
               const Matrix& Q, double Ts);

  /// Consumes the measured output y = [q, r] and the outer-loop command,
  /// returns the inner-loop rate command u_ad held over the next period.
  Vector step(const Vector& y, const Vector& omega_c);
  void reset();

  const DesiredSystem& desired() const { return desired_; }
  const L1Gains& gains() const { return gains_; }
  const LtiSystem& filter() const { return filter_; }
  const Vector& x_hat() const { return x_hat_; }
  const Vector& y_hat() const { return y_hat_; }
  const Vector& sigma_hat() const { return sigma_hat_; }
  const Vector& x_u() const { return x_u_; }
  long steps() const { return steps_; }

 private:
  DesiredSystem desired_;
  L1Gains gains_;
  LtiSystem filter_;
  FilterDiscretization fd_;
  Vector x_hat_;
  Vector y_hat_;
  Vector sigma_hat_;
  Vector x_u_;
  long steps_ = 0;
};

}  // namespace auvgnc
