#include "auvgnc/bound_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace auvgnc {

BoundReport monitor_bounds(const RunLog& log, const PFParams& params,
                           const PFGains& gains, double tol) {
  BoundReport r;
  r.samples = log.size();
  r.decay_rate = 2.0 * params.lambda * (1.0 - params.delta_lambda);
  r.ultimate_bound =
      0.5 * params.c * params.delta_omega / (params.lambda * params.delta_lambda);

  for (std::size_t i = 0; i < log.size(); ++i) {
    r.sup_gamma_dot = std::max(r.sup_gamma_dot, std::abs(log.at(i, Col::gamma_dot)));
    r.sup_omega_DT = std::max(r.sup_omega_DT, log.at(i, Col::omega_DT_norm));
    r.omega_T_max = std::max(r.omega_T_max, log.at(i, Col::bending));
    const Vec2 cmd(log.at(i, Col::q_c), log.at(i, Col::r_c));
    const Vec2 rates(log.at(i, Col::q), log.at(i, Col::r));
    r.measured_delta_omega = std::max(r.measured_delta_omega, (cmd - rates).norm());
  }
  r.constraints = check_pf_constraints(params, gains, r.omega_T_max, r.sup_gamma_dot,
                                       r.sup_omega_DT, params.delta_omega);
  r.measured_delta_omega_ok = r.measured_delta_omega < r.constraints.delta_omega_bound ||
                              r.measured_delta_omega == 0.0;

  if (log.size() == 0) {
    r.measured_delta_omega_ok = true;
    return r;
  }
  const double t0 = log.at(0, Col::t);
  r.V0 = log.at(0, Col::V);
  r.started_in_domain = in_domain(r.V0, params.c);
  r.max_excess = -std::numeric_limits<double>::infinity();

  for (std::size_t i = 0; i < log.size(); ++i) {
    const double t = log.at(i, Col::t);
    const double V = log.at(i, Col::V);
    if (!r.T_b && V <= r.ultimate_bound) r.T_b = t;
    const double bound =
        r.T_b ? r.ultimate_bound : std::exp(-r.decay_rate * (t - t0)) * r.V0;
    const double excess = V - bound;
    r.max_excess = std::max(r.max_excess, excess);
    if (excess > tol) {
      ++r.violations;
      if (!r.first_violation_t) r.first_violation_t = t;
    }
  }
  return r;
}

}  // namespace auvgnc
