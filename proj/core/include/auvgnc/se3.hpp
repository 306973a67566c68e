#pragma once

#include <utility>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace auvgnc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;

inline constexpr double kOrthonormalityTol = 1e-9;
inline constexpr double kIdentityTol = 1e-12;

/// Antisymmetric 3x3 matrix. Only constructible from a vector (via hat) or
/// from a matrix that passes the antisymmetry check, so S + S^T = 0 holds
/// exactly for every instance.
class SkewMatrix3 {
 public:
  SkewMatrix3() : m_(Matrix3::Zero()) {}

  /// Throws Error(kNonSkewInput) if |S + S^T| exceeds `tol` entrywise.
  static SkewMatrix3 from_matrix(const Matrix3& s, double tol = kIdentityTol);

  const Matrix3& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

 private:
  friend SkewMatrix3 hat(const Vec3& v);
  explicit SkewMatrix3(const Matrix3& m) : m_(m) {}
  Matrix3 m_;
};

/// Element of SO(3): R^T R = I and det R = +1 within kOrthonormalityTol.
class Rotation3 {
 public:
  Rotation3() : m_(Matrix3::Identity()) {}

  static Rotation3 identity() { return Rotation3(); }

  /// Validates orthonormality and det = +1; throws kInvalidArgument.
  static Rotation3 from_matrix(const Matrix3& m,
                               double tol = kOrthonormalityTol);

  /// Gram-Schmidt on the columns of a near-rotation. The first column keeps
  /// its direction; the third is rebuilt as c1 x c2 so det = +1.
  static Rotation3 orthonormalized(const Matrix3& m);

  /// Frame whose first column is `first` and second column lies in the plane
  /// of `first` and `second`.
  static Rotation3 from_two_columns(const Vec3& first, const Vec3& second);

  static Rotation3 about_axis(const Vec3& axis, double angle);

  const Matrix3& matrix() const { return m_; }
  Vec3 col(int i) const { return m_.col(i); }
  double operator()(int r, int c) const { return m_(r, c); }

  Rotation3 transpose() const { return Rotation3(m_.transpose()); }
  Rotation3 operator*(const Rotation3& rhs) const {
    return Rotation3(m_ * rhs.m_);
  }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  /// Frobenius norm of R^T R - I.
  double orthonormality_error() const;

 private:
  explicit Rotation3(const Matrix3& m) : m_(m) {}
  Matrix3 m_;
};

/// (xi)^ : R^3 -> so(3).
SkewMatrix3 hat(const Vec3& v);

/// Inverse of hat.
Vec3 vee(const SkewMatrix3& s);

/// vee of a general matrix; throws kNonSkewInput when S is not antisymmetric
/// within `tol`.
Vec3 vee(const Matrix3& s, double tol = kIdentityTol);

/// Both sides of tr[hat(xi) T] = -xi . (T - T^T)^vee. Returns {lhs, rhs}.
std::pair<double, double> trace_identity_check(const Vec3& xi,
                                               const Matrix3& t);

}  // namespace auvgnc
