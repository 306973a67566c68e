#pragma once

#include <optional>

#include "auvgnc/path_following.hpp"
#include "auvgnc/simulation.hpp"

namespace auvgnc {

/// A posteriori check of the path-following bounds on a logged run.
struct BoundReport {
  double V0 = 0.0;
  bool started_in_domain = false;
  double decay_rate = 0.0;      // 2 lambda (1 - delta_lambda)
  double ultimate_bound = 0.0;  // (c/2) delta_omega / (lambda delta_lambda)
  std::optional<double> T_b;    // first t with V <= ultimate_bound
  int violations = 0;
  std::optional<double> first_violation_t;
  double max_excess = 0.0;      // largest V - bound seen (may be negative)
  std::size_t samples = 0;

  double sup_gamma_dot = 0.0;
  double sup_omega_DT = 0.0;
  double omega_T_max = 0.0;     // max sqrt(k1^2 + k2^2) over the log
  double measured_delta_omega = 0.0;
  PFConstraintReport constraints;           // with the design delta_omega
  bool measured_delta_omega_ok = false;     // measured value against 2 lambda delta_lambda c

  bool pass() const {
    return violations == 0 && constraints.all_ok() && measured_delta_omega_ok;
  }
};

/// Envelope V(t) <= exp(-decay_rate (t - t0)) V0 until T_b, V <= ultimate
/// bound afterwards; both with absolute tolerance `tol`.
BoundReport monitor_bounds(const RunLog& log, const PFParams& params,
                           const PFGains& gains, double tol = 1e-6);

}  // namespace auvgnc
