#include "auvgnc/se3.hpp"

#include <cmath>
#include <sstream>

#include "auvgnc/error.hpp"

namespace auvgnc {

SkewMatrix3 SkewMatrix3::from_matrix(const Matrix3& s, double tol) {
  const double asym = (s + s.transpose()).cwiseAbs().maxCoeff();
  if (!(asym <= tol)) {
    std::ostringstream os;
    os << "matrix is not antisymmetric (max |S+S^T| = " << asym << ")";
    throw Error(ErrorCode::kNonSkewInput, os.str());
  }
  // Store the exactly antisymmetric part.
  return SkewMatrix3(0.5 * (s - s.transpose()));
}

Rotation3 Rotation3::from_matrix(const Matrix3& m, double tol) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "rotation has non-finite entries");
  }
  const double ortho = (m.transpose() * m - Matrix3::Identity()).norm();
  const double det = m.determinant();
  if (ortho > tol || std::abs(det - 1.0) > tol) {
    std::ostringstream os;
    os << "not a rotation: |R^T R - I|_F = " << ortho << ", det = " << det;
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  return Rotation3(m);
}

Rotation3 Rotation3::orthonormalized(const Matrix3& m) {
  return from_two_columns(m.col(0), m.col(1));
}

Rotation3 Rotation3::from_two_columns(const Vec3& first, const Vec3& second) {
  const double n1 = first.norm();
  if (!(n1 > 0.0) || !std::isfinite(n1)) {
    throw Error(ErrorCode::kInvalidArgument, "first column has zero length");
  }
  const Vec3 c1 = first / n1;
  Vec3 c2 = second - second.dot(c1) * c1;
  const double n2 = c2.norm();
  if (!(n2 > 1e-12 * std::max(1.0, second.norm()))) {
    throw Error(ErrorCode::kInvalidArgument, "columns are parallel");
  }
  c2 /= n2;
  Matrix3 r;
  r.col(0) = c1;
  r.col(1) = c2;
  r.col(2) = c1.cross(c2);
  return Rotation3(r);
}

Rotation3 Rotation3::about_axis(const Vec3& axis, double angle) {
  return Rotation3(
      Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix());
}

double Rotation3::orthonormality_error() const {
  return (m_.transpose() * m_ - Matrix3::Identity()).norm();
}

SkewMatrix3 hat(const Vec3& v) {
  Matrix3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return SkewMatrix3(s);
}

Vec3 vee(const SkewMatrix3& s) {
  return Vec3(s(2, 1), s(0, 2), s(1, 0));
}

Vec3 vee(const Matrix3& s, double tol) {
  return vee(SkewMatrix3::from_matrix(s, tol));
}

std::pair<double, double> trace_identity_check(const Vec3& xi,
                                               const Matrix3& t) {
  const double lhs = (hat(xi).matrix() * t).trace();
  const Matrix3 skew_part = t - t.transpose();
  const Vec3 v(skew_part(2, 1), skew_part(0, 2), skew_part(1, 0));
  return {lhs, -xi.dot(v)};
}

}  // namespace auvgnc
