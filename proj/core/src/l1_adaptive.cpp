#include "auvgnc/l1_adaptive.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "auvgnc/error.hpp"

namespace auvgnc {

DesiredSystem DesiredSystem::make(LtiSystem m) {
  if (m.m() != m.p() || m.n() < m.p()) {
    throw Error(ErrorCode::kInvalidArgument, "M must be square with n_m >= p");
  }
  if (!m.strictly_proper()) {
    throw Error(ErrorCode::kInvalidArgument, "M must be strictly proper");
  }
  if (!is_hurwitz(m.A)) {
    std::ostringstream os;
    os << "A_m is not Hurwitz (spectral abscissa " << spectral_abscissa(m.A)
       << ")";
    throw Error(ErrorCode::kNotHurwitz, os.str());
  }
  Eigen::FullPivLU<Matrix> cb(m.C * m.B);
  if (!cb.isInvertible()) {
    throw Error(ErrorCode::kInvalidArgument, "C_m B_m is singular");
  }
  const Matrix dc = m.C * m.A.fullPivLu().solve(m.B);
  Eigen::FullPivLU<Matrix> dclu(dc);
  if (!dclu.isInvertible()) {
    throw Error(ErrorCode::kInvalidArgument, "M(0) is singular");
  }
  DesiredSystem out;
  out.K_g = -dclu.inverse();
  out.sys = std::move(m);
  return out;
}

LtiSystem diagonal_tf(
    const std::vector<std::pair<Polynomial, Polynomial>>& entries) {
  std::vector<LtiSystem> blocks;
  blocks.reserve(entries.size());
  for (const auto& [num, den] : entries) blocks.push_back(tf_to_ss(num, den));
  return block_diagonal(blocks);
}

L1Gains build_gains(const DesiredSystem& desired, const Matrix& Q, double Ts) {
  if (!(Ts > 0.0) || !std::isfinite(Ts)) {
    throw Error(ErrorCode::kInvalidArgument, "Ts must be positive");
  }
  const LtiSystem& m = desired.sys;
  const int n = m.n(), p = m.p();
  if (Q.rows() != n || Q.cols() != n || !Q.allFinite()) {
    throw Error(ErrorCode::kNonSpdQ, "Q must be a finite n_m x n_m matrix");
  }
  const double qscale = std::max(Q.cwiseAbs().maxCoeff(), 1e-300);
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * qscale) {
    throw Error(ErrorCode::kNonSpdQ, "Q is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> qeig(Q);
  if (qeig.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorCode::kNonSpdQ, "Q is not positive definite");
  }

  L1Gains g;
  g.Ts = Ts;
  g.P = solve_lyapunov(m.A, Q);
  Eigen::SelfAdjointEigenSolver<Matrix> peig(g.P);
  g.sqrtP = peig.eigenvectors() *
            peig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
            peig.eigenvectors().transpose();

  const Matrix sqrtP_inv = g.sqrtP.inverse();
  const Matrix basis = null_space(m.C * sqrtP_inv);
  g.D = basis.transpose();
  for (Eigen::Index r = 0; r < g.D.rows(); ++r) {
    Eigen::Index idx = 0;
    g.D.row(r).cwiseAbs().maxCoeff(&idx);
    if (g.D(r, idx) < 0.0) g.D.row(r) *= -1.0;
  }

  g.Lambda.resize(n, n);
  g.Lambda.topRows(p) = m.C;
  if (n > p) g.Lambda.bottomRows(n - p) = g.D * g.sqrtP;
  Eigen::FullPivLU<Matrix> llu(g.Lambda);
  if (!llu.isInvertible() || llu.rcond() < 1e-12) {
    throw Error(ErrorCode::kSingularLambda, "Lambda is singular");
  }
  const Matrix a_bar = g.Lambda * m.A * llu.inverse();
  g.Phi = integral_expm(a_bar, Ts, g.Lambda);
  Eigen::FullPivLU<Matrix> plu(g.Phi);
  if (!plu.isInvertible() || plu.rcond() < 1e-14) {
    throw Error(ErrorCode::kSingularPhi, "Phi(Ts) is singular");
  }
  Matrix one = Matrix::Zero(n, p);
  one.topRows(p) = Matrix::Identity(p, p);
  g.adapt = -plu.solve(expm(a_bar * Ts) * one);

  g.Am_exp = expm(m.A * Ts);
  g.Am_int = integral_expm(m.A, Ts, Matrix::Identity(n, n));
  g.Am_exp_neg = expm(-m.A * Ts);
  g.Cm_pinv = right_pseudo_inverse(m.C);
  return g;
}

Vector adaptation_step(const L1Gains& gains, const Vector& y_hat,
                       const Vector& y) {
  return gains.adapt * (y_hat - y);
}

Vector predictor_step(const DesiredSystem& desired, const L1Gains& gains,
                      const Vector& x_hat, const Vector& u,
                      const Vector& sigma_hat) {
  return gains.Am_exp * x_hat +
         gains.Am_int * (desired.sys.B * u + sigma_hat);
}

LtiSystem build_filter(const DesiredSystem& desired,
                       const LtiSystem& c_filter) {
  const int p = desired.p();
  if (c_filter.m() != p || c_filter.p() != p) {
    throw Error(ErrorCode::kNonProperFilter, "C(s) must be p x p");
  }
  const double dscale = std::max(1.0, c_filter.C.cwiseAbs().maxCoeff());
  if (!c_filter.strictly_proper(1e-14 * dscale)) {
    throw Error(ErrorCode::kNonProperFilter, "C(s) is not strictly proper");
  }
  if (!is_hurwitz(c_filter.A)) {
    throw Error(ErrorCode::kUnstableFilter, "C(s) is not stable");
  }
  const Matrix c0 = dc_gain(c_filter);
  if ((c0 - Matrix::Identity(p, p)).cwiseAbs().maxCoeff() > 1e-8) {
    std::ostringstream os;
    os << "C(0) must equal the identity, got\n" << c0;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  for (const auto& z : transmission_zeros(desired.sys)) {
    if (z.real() >= 0.0) {
      std::ostringstream os;
      os << "M(s) has a zero at " << z.real() << (z.imag() >= 0 ? "+" : "")
         << z.imag() << "j";
      throw Error(ErrorCode::kNonMinimumPhaseM, os.str());
    }
  }
  const LtiSystem& m = desired.sys;
  const LtiSystem state_map(m.A, Matrix::Identity(m.n(), m.n()), m.C);
  const LtiSystem n_sys = left_divide(m, state_map);
  LtiSystem o = minimal_realization(series(c_filter, n_sys));
  if (o.n() > 0 && !is_hurwitz(o.A)) {
    throw Error(ErrorCode::kUnstableFilter, "O(s) is not stable");
  }
  return o;
}

FilterDiscretization discretize_filter(const LtiSystem& filter,
                                       const L1Gains& gains) {
  FilterDiscretization fd;
  fd.Ao_exp = expm(filter.A * gains.Ts);
  fd.G = integral_expm(filter.A, gains.Ts, filter.B * gains.Am_exp_neg);
  fd.Co = filter.C;
  return fd;
}

ControlOutput control_step(const DesiredSystem& desired,
                           const FilterDiscretization& filter,
                           const Vector& x_u, const Vector& omega_c,
                           const Vector& sigma_hat) {
  ControlOutput out;
  out.u = desired.K_g * omega_c - filter.Co * x_u;
  out.x_u_next = filter.Ao_exp * x_u + filter.G * sigma_hat;
  return out;
}

L1Controller::L1Controller(DesiredSystem desired, const LtiSystem& c_filter,
                           const Matrix& Q, double Ts)
    : desired_(std::move(desired)),
      gains_(build_gains(desired_, Q, Ts)),
      filter_(build_filter(desired_, c_filter)),
      fd_(discretize_filter(filter_, gains_)) {
  reset();
}

void L1Controller::reset() {
  x_hat_ = Vector::Zero(desired_.n());
  y_hat_ = Vector::Zero(desired_.p());
  sigma_hat_ = Vector::Zero(desired_.n());
  x_u_ = Vector::Zero(filter_.n());
  steps_ = 0;
}

Vector L1Controller::step(const Vector& y, const Vector& omega_c) {
  if (y.size() != desired_.p() || omega_c.size() != desired_.p()) {
    throw Error(ErrorCode::kInvalidArgument, "L1Controller: size mismatch");
  }
  if (steps_ == 0) x_hat_ = gains_.Cm_pinv * y;
  y_hat_ = desired_.sys.C * x_hat_;
  sigma_hat_ = adaptation_step(gains_, y_hat_, y);
  const ControlOutput co = control_step(desired_, fd_, x_u_, omega_c, sigma_hat_);
  x_hat_ = predictor_step(desired_, gains_, x_hat_, co.u, sigma_hat_);
  x_u_ = co.x_u_next;
  ++steps_;
  return co.u;
}

}  // namespace auvgnc
