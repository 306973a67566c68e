#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace auvgnc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Continuous-time state-space realization
///   x' = A x + B u,  y = C x + D u.
/// D defaults to zero; most systems handled here are strictly proper.
struct LtiSystem {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;

  LtiSystem() = default;
  /// Validates dimensions; throws kInvalidArgument on mismatch.
  LtiSystem(Matrix a, Matrix b, Matrix c);
  LtiSystem(Matrix a, Matrix b, Matrix c, Matrix d);

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }
  bool strictly_proper(double tol = 0.0) const;
};

/// Polynomial coefficients, highest power first.
using Polynomial = std::vector<double>;

/// Observable canonical realization of num(s)/den(s); requires
/// deg num <= deg den.
LtiSystem tf_to_ss(const Polynomial& num, const Polynomial& den);

/// Pure gain y = K u.
LtiSystem static_gain(const Matrix& k);

LtiSystem block_diagonal(const std::vector<LtiSystem>& blocks);

/// Cascade: returns g2(s) g1(s) (g1 applied first).
LtiSystem series(const LtiSystem& g2, const LtiSystem& g1);

/// g1(s) + sign * g2(s).
LtiSystem parallel(const LtiSystem& g1, const LtiSystem& g2,
                   double sign = 1.0);

/// G(s)^{-1} for square G with invertible D.
LtiSystem inverse(const LtiSystem& g);

/// G(s)^T.
LtiSystem transpose(const LtiSystem& g);

/// s G(s) for strictly proper G.
LtiSystem multiply_by_s(const LtiSystem& g);

/// M(s)^{-1} X(s) for a square M with C_m B_m invertible (relative degree
/// one in every channel) and strictly proper X. The realization carries
/// the zero dynamics of M; no uncontrollable modes at the origin are
/// introduced.
LtiSystem left_divide(const LtiSystem& m, const LtiSystem& x);

/// X(s) M(s)^{-1}, by transposition of left_divide.
LtiSystem right_divide(const LtiSystem& x, const LtiSystem& m);

/// Transmission zeros of a square M with C_m B_m invertible.
std::vector<std::complex<double>> transmission_zeros(const LtiSystem& m);

/// Removes uncontrollable then unobservable states (orthogonal Krylov
/// staircase). `tol` is relative to the matrix norms.
LtiSystem minimal_realization(const LtiSystem& g, double tol = 1e-10);

/// Largest real part of the eigenvalues of A (-inf for an empty matrix).
double spectral_abscissa(const Matrix& a);
bool is_hurwitz(const Matrix& a, double margin = 0.0);
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

/// C (jw I - A)^{-1} B + D.
Eigen::MatrixXcd frequency_response(const LtiSystem& g, double omega);

/// -C A^{-1} B + D.
Matrix dc_gain(const LtiSystem& g);

/// Matrix exponential (scaling and squaring with Pade approximants).
Matrix expm(const Matrix& a);

/// int_0^h e^{A s} ds * B, from the block exponential of [[A, B], [0, 0]].
Matrix integral_expm(const Matrix& a, double h, const Matrix& b);

/// Solves A^T P + P A = -Q (P symmetric).
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

/// Right pseudo-inverse T^T (T T^T)^{-1} of a full-row-rank matrix.
Matrix right_pseudo_inverse(const Matrix& t);

/// Orthonormal basis (columns) of the null space of `t`.
Matrix null_space(const Matrix& t, double tol = 1e-12);

/// Induced L-infinity norm: max row sum of |entries|.
double inf_norm(const Matrix& m);

struct L1NormOptions {
  double horizon_tol = 1e-9;
  // Integration interval = step_scale / max |eigenvalue|.
  double step_scale = 0.05;
  // Hard cap on the number of intervals per input column.
  long max_intervals = 50'000'000;
};

/// ||G||_L1: per-entry integral of |g_ij(t)| of the impulse response
/// (plus |D_ij| for the impulsive part), combined as the max row sum.
/// Throws kNotHurwitz for unstable A.
double l1_norm(const LtiSystem& g, const L1NormOptions& opts = {});

/// Entry-wise L1 norms ||g_ij||_L1 (same integration as l1_norm).
Matrix l1_norm_entries(const LtiSystem& g, const L1NormOptions& opts = {});

}  // namespace auvgnc
