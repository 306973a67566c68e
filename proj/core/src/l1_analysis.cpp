#include "auvgnc/l1_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "auvgnc/error.hpp"

namespace auvgnc {

namespace {

Matrix closed_loop_matrix(const LtiSystem& plant, const Matrix& K) {
  if (K.rows() != plant.m() || K.cols() != plant.n()) {
    throw Error(ErrorCode::kInvalidArgument, "K must be m x n_p");
  }
  return plant.A - plant.B * K;
}

LtiSystem identity_gain(int p) {
  return static_gain(Matrix::Identity(p, p));
}

}  // namespace

InnerLoopTransfers build_transfers(const LtiSystem& plant, const Matrix& K,
                                   const DesiredSystem& desired,
                                   const LtiSystem& c_filter) {
  const Matrix abar = closed_loop_matrix(plant, K);
  if (!is_hurwitz(abar)) {
    throw Error(ErrorCode::kNotHurwitz, "A_p - B_p K is not Hurwitz");
  }
  const int np = plant.n(), p = desired.p();
  if (plant.m() != p || plant.p() != p) {
    throw Error(ErrorCode::kInvalidArgument, "plant must be p x p");
  }
  const LtiSystem& m = desired.sys;
  const LtiSystem eye = identity_gain(p);

  InnerLoopTransfers tr;
  tr.P = LtiSystem(abar, plant.B, plant.C);
  tr.H0 = LtiSystem(abar, plant.B, Matrix::Identity(np, np));
  const LtiSystem mip = minimal_realization(left_divide(m, tr.P));
  const LtiSystem dlt = minimal_realization(parallel(mip, eye, -1.0));
  const LtiSystem loop = minimal_realization(series(dlt, c_filter));
  tr.H1 = minimal_realization(inverse(parallel(eye, loop)));
  const LtiSystem h0ch1 =
      minimal_realization(series(series(tr.H0, c_filter), tr.H1));
  tr.H2 = minimal_realization(parallel(tr.H0, series(h0ch1, dlt), -1.0));
  tr.H3 = minimal_realization(series(tr.H1, mip));
  tr.H4 = minimal_realization(series(tr.H1, dlt));
  tr.H5 = minimal_realization(right_divide(h0ch1, m));
  tr.G = minimal_realization(parallel(tr.H0, series(tr.H5, tr.P), -1.0));
  const Matrix cm_pinv = right_pseudo_inverse(m.C);
  tr.H_in = minimal_realization(
      parallel(LtiSystem(abar, Matrix::Identity(np, np), plant.C),
               LtiSystem(m.A, cm_pinv * plant.C, m.C), -1.0));
  return tr;
}

Matrix stabilizing_feedback(const LtiSystem& plant, double slow_threshold,
                            double target) {
  const int n = plant.n(), mi = plant.m();
  Eigen::EigenSolver<Matrix> es(plant.A.transpose());
  const auto ev = es.eigenvalues();
  const auto vec = es.eigenvectors();

  // Real basis of the left-invariant subspace of the slow eigenvalues.
  Matrix raw(n, 0);
  for (int i = 0; i < n; ++i) {
    if (ev(i).real() <= slow_threshold) continue;
    if (ev(i).imag() < 0.0) continue;  // conjugate partner handled below
    raw.conservativeResize(n, raw.cols() + 1);
    raw.col(raw.cols() - 1) = vec.col(i).real();
    if (ev(i).imag() > 0.0) {
      raw.conservativeResize(n, raw.cols() + 1);
      raw.col(raw.cols() - 1) = vec.col(i).imag();
    }
  }
  if (raw.cols() == 0) return Matrix::Zero(mi, n);
  const Eigen::HouseholderQR<Matrix> qr(raw);
  const Matrix w = qr.householderQ() * Matrix::Identity(n, raw.cols());
  const int k = static_cast<int>(w.cols());

  const Matrix a_s = w.transpose() * plant.A * w;
  const Matrix b_s = w.transpose() * plant.B;
  if (k > mi) {
    throw Error(ErrorCode::kInvalidArgument,
                "more slow modes than inputs; modal shift not available");
  }
  Eigen::JacobiSVD<Matrix> svd(b_s);
  if (svd.singularValues().minCoeff() <= 1e-12 * std::max(1.0, b_s.norm())) {
    throw Error(ErrorCode::kInvalidArgument, "slow modes are not controllable");
  }
  const Matrix target_block = target * Matrix::Identity(k, k);
  const Matrix f = right_pseudo_inverse(b_s) * (a_s - target_block);
  return f * w.transpose();
}

StabilityReport stability_check(const LtiSystem& plant, const Matrix& K,
                                const DesiredSystem& desired,
                                const LtiSystem& c_filter,
                                const UncertaintyBounds& bounds) {
  StabilityReport rep;
  rep.rho_0 = bounds.rho_0;
  rep.M_omega = bounds.M_omega;
  rep.L0 = bounds.L0;
  rep.gamma_bar_1 = bounds.gamma_bar_1;
  rep.K_inf_norm = inf_norm(K);
  rep.cond3_margin = -std::numeric_limits<double>::infinity();

  const int p = desired.p();
  rep.cond2_pass = c_filter.strictly_proper() && c_filter.p() == p &&
                   c_filter.m() == p;
  if (!rep.cond2_pass) return rep;

  const InnerLoopTransfers tr = build_transfers(plant, K, desired, c_filter);
  rep.cond1_pass = tr.H1.n() == 0 || is_hurwitz(tr.H1.A);
  if (!rep.cond1_pass) return rep;

  const int np = plant.n();
  const Matrix abar = closed_loop_matrix(plant, K);
  const LtiSystem& m = desired.sys;

  rep.G_L1_norm = l1_norm(tr.G);
  const LtiSystem s_phi = multiply_by_s(
      LtiSystem(abar, Matrix::Identity(np, np), Matrix::Identity(np, np)));
  const LtiSystem s_h5hin =
      multiply_by_s(minimal_realization(series(tr.H5, tr.H_in)));
  rep.rho_1 = l1_norm(minimal_realization(parallel(s_phi, s_h5hin, -1.0))) *
              bounds.rho_0;
  rep.rho_2 = l1_norm(series(tr.H2, static_gain(desired.K_g))) * bounds.M_omega;

  auto lipschitz = [&](double rho_r) {
    return (bounds.gamma_bar_1 + rho_r) / rho_r *
           (bounds.F_delta(rho_r + bounds.gamma_bar_1) + rep.K_inf_norm);
  };

  constexpr int kGrid = 50;
  for (int i = 1; i <= kGrid; ++i) {
    const double rho_r = bounds.rho_0 * std::pow(10.0, 6.0 * i / kGrid);
    const double L = lipschitz(rho_r);
    const double num = rho_r - rep.rho_1 - rep.rho_2;
    const double den = L * rho_r + bounds.L0;
    double rhs;
    if (den > 0.0) {
      rhs = num / den;
    } else {
      rhs = num > 0.0 ? std::numeric_limits<double>::infinity()
                      : -std::numeric_limits<double>::infinity();
    }
    const double margin = rhs - rep.G_L1_norm;
    if (margin > rep.cond3_margin) {
      rep.cond3_margin = margin;
      rep.rho_r = rho_r;
      rep.L_rho_r = L;
      rep.F_delta = bounds.F_delta(rho_r + bounds.gamma_bar_1);
    }
  }
  rep.cond3_pass = rep.cond3_margin > 0.0;

  const LtiSystem eye = identity_gain(p);
  const double n_ch3 = l1_norm(minimal_realization(series(c_filter, tr.H3)));
  const LtiSystem ch1mi =
      minimal_realization(right_divide(series(c_filter, tr.H1), m));
  const double n_sch1 =
      l1_norm(multiply_by_s(minimal_realization(series(ch1mi, tr.H_in))));
  const double n_ich4 = l1_norm(minimal_realization(
      series(parallel(eye, series(c_filter, tr.H4), -1.0),
             static_gain(desired.K_g))));
  rep.rho_ur = n_ch3 * (rep.L_rho_r * rep.rho_r + bounds.L0) +
               n_sch1 * bounds.rho_0 + n_ich4 * bounds.M_omega;
  return rep;
}

namespace {

void check_horizon(double dt, double T) {
  if (!(dt > 0.0) || !(T >= 0.0) || !std::isfinite(T)) {
    throw Error(ErrorCode::kInvalidArgument, "need dt > 0 and T >= 0");
  }
}

long step_count(double dt, double T) {
  return static_cast<long>(std::llround(T / dt));
}

}  // namespace

Trajectory reference_system_sim(const LtiSystem& plant, const Uncertainty& f,
                                const DesiredSystem& desired,
                                const LtiSystem& c_filter, const Signal& omega_c,
                                const Vector& x0, double dt, double T) {
  check_horizon(dt, T);
  const LtiSystem& m = desired.sys;
  const int np = plant.n(), nc = c_filter.n(), nm = m.n();
  if (x0.size() != np) {
    throw Error(ErrorCode::kInvalidArgument, "x0 has the wrong size");
  }
  if (!c_filter.strictly_proper()) {
    throw Error(ErrorCode::kNonProperFilter, "C(s) is not strictly proper");
  }
  const Matrix e = (m.C * m.B).inverse();
  const Matrix cmam = m.C * m.A;

  // Stacked state [x_ref; x_c; x_m].
  auto u_of = [&](double t, const Vector& z) -> Vector {
    return desired.K_g * omega_c(t) - c_filter.C * z.segment(np, nc);
  };
  auto rhs = [&](double t, const Vector& z) {
    const Vector x = z.head(np);
    const Vector xm = z.tail(nm);
    const Vector u = u_of(t, z);
    const Vector xdot = plant.A * x + plant.B * (u + f(t, x));
    const Vector drive = e * (plant.C * xdot - cmam * xm);  // u + sigma
    Vector dz(np + nc + nm);
    dz.head(np) = xdot;
    dz.segment(np, nc) = c_filter.A * z.segment(np, nc) + c_filter.B * (drive - u);
    dz.tail(nm) = m.A * xm + m.B * drive;
    return dz;
  };

  Vector z = Vector::Zero(np + nc + nm);
  z.head(np) = x0;
  z.tail(nm) = right_pseudo_inverse(m.C) * (plant.C * x0);

  const long steps = step_count(dt, T);
  Trajectory tr;
  tr.dt = dt;
  for (long k = 0; k <= steps; ++k) {
    const double t = k * dt;
    tr.t.push_back(t);
    tr.x.push_back(z.head(np));
    tr.u.push_back(u_of(t, z));
    tr.y.push_back(plant.C * z.head(np));
    if (k == steps) break;
    const Vector k1 = rhs(t, z);
    const Vector k2 = rhs(t + 0.5 * dt, z + 0.5 * dt * k1);
    const Vector k3 = rhs(t + 0.5 * dt, z + 0.5 * dt * k2);
    const Vector k4 = rhs(t + dt, z + dt * k3);
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return tr;
}

Trajectory closed_loop_sim(const LtiSystem& plant, const Uncertainty& f,
                           const DesiredSystem& desired,
                           const LtiSystem& c_filter, const Matrix& Q,
                           double Ts, const Signal& omega_c, const Vector& x0,
                           double dt, double T) {
  check_horizon(dt, T);
  const long ratio = std::llround(Ts / dt);
  if (ratio < 1 || std::abs(ratio * dt - Ts) > 1e-9 * Ts) {
    throw Error(ErrorCode::kInvalidArgument, "Ts must be a multiple of dt");
  }
  if (x0.size() != plant.n()) {
    throw Error(ErrorCode::kInvalidArgument, "x0 has the wrong size");
  }
  L1Controller ctrl(desired, c_filter, Q, Ts);

  auto rhs = [&](double t, const Vector& x, const Vector& u) -> Vector {
    return plant.A * x + plant.B * (u + f(t, x));
  };

  const long steps = step_count(dt, T);
  Trajectory tr;
  tr.dt = dt;
  Vector x = x0;
  Vector u = Vector::Zero(plant.m());
  for (long k = 0; k <= steps; ++k) {
    const double t = k * dt;
    if (k % ratio == 0) u = ctrl.step(plant.C * x, omega_c(t));
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.u.push_back(u);
    tr.y.push_back(plant.C * x);
    if (k == steps) break;
    const Vector k1 = rhs(t, x, u);
    const Vector k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1, u);
    const Vector k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2, u);
    const Vector k4 = rhs(t + dt, x + dt * k3, u);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return tr;
}

GapReport theorem2_gap(const Trajectory& closed_loop,
                       const Trajectory& reference) {
  const auto& a = closed_loop;
  const auto& b = reference;
  if (a.t.size() != b.t.size() || a.x.size() != b.x.size() ||
      a.u.size() != b.u.size() || a.t.size() != a.x.size() ||
      std::abs(a.dt - b.dt) > 1e-12 * std::max(1.0, a.dt)) {
    throw Error(ErrorCode::kMismatchedRuns, "runs differ in length or dt");
  }
  GapReport gap;
  for (std::size_t k = 0; k < a.t.size(); ++k) {
    if (a.x[k].size() != b.x[k].size() || a.u[k].size() != b.u[k].size()) {
      throw Error(ErrorCode::kMismatchedRuns, "runs differ in dimension");
    }
    gap.gamma_x = std::max(gap.gamma_x, (b.x[k] - a.x[k]).cwiseAbs().maxCoeff());
    gap.gamma_u = std::max(gap.gamma_u, (b.u[k] - a.u[k]).cwiseAbs().maxCoeff());
  }
  return gap;
}

}  // namespace auvgnc
