#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "auvgnc/se3.hpp"

namespace auvgnc {

/// Desired geometric path p_d(gamma) = sum_j pbar_j b_{j,N}(gamma) over
/// virtual time gamma in [0, T_f]. Immutable after construction.
class BernsteinPath {
 public:
  /// Throws kInvalidArgument unless degree >= 1, T_f > 0 and all control
  /// points are finite.
  BernsteinPath(std::vector<Vec3> control_points, double final_time);

  int degree() const { return static_cast<int>(points_.size()) - 1; }
  double final_time() const { return final_time_; }
  const std::vector<Vec3>& control_points() const { return points_; }

  /// p_d(gamma), de Casteljau. Throws kGammaOutOfRange outside [0, T_f].
  Vec3 eval(double gamma) const;

  /// d^order p_d / d gamma^order via the hodograph control points.
  Vec3 derivative(double gamma, int order) const;

  /// Unit tangent t1 = p_d' / |p_d'|. Throws kDegeneratePath when
  /// |p_d'| < min_speed.
  Vec3 tangent(double gamma, double min_speed = 1e-12) const;

  /// d t1 / d gamma = (p'' - t1 (t1 . p'')) / |p'|.
  Vec3 tangent_derivative(double gamma) const;

  double speed(double gamma) const { return derivative(gamma, 1).norm(); }

 private:
  void check_gamma(double gamma) const;

  std::vector<Vec3> points_;
  // Hodograph control points: hodo_[k] holds the coefficients of the k-th
  // derivative (already scaled by N!/(N-k)! / T_f^k).
  std::vector<std::vector<Vec3>> hodo_;
  double final_time_;
};

/// Parallel-transport frame of the virtual target at `gamma`.
struct TransportFrame {
  double gamma = 0.0;
  Rotation3 R_TI;  // columns t1, t2, t3
  double k1 = 0.0;
  double k2 = 0.0;
};

/// Speed and bending limits for a path.
struct PathBounds {
  double v_T_min = 0.0;
  double v_T_max = 0.0;
  double omega_T_max = 0.0;
};

struct PathBoundsReport {
  double min_speed = 0.0;
  double max_speed = 0.0;
  double max_bending = 0.0;  // max sqrt(k1^2 + k2^2)
  int samples = 0;
  bool pass = false;
};

struct CurvatureTorsion {
  double kappa = 0.0;
  double tau = 0.0;
  bool torsion_undefined = false;
};

/// Frame at gamma = 0. t1 is the unit tangent, t3 the normalized component
/// of world-down (-z) orthogonal to t1, t2 = t3 x t1. Falls back to world +y
/// when the tangent is vertical within 1e-6.
TransportFrame initial_frame(const BernsteinPath& path);

/// Builds a frame at `gamma` whose normal vectors are seeded from
/// `seed_normal` (projected); k1, k2 are evaluated there.
TransportFrame frame_with_normal(const BernsteinPath& path, double gamma,
                                 const Vec3& seed_normal);

/// Integrates t2' = -k1 t1, t3' = -k2 t1 from frame.gamma to gamma_next
/// with RK4 substeps no longer than max_substep_fraction * T_f.
/// Re-orthonormalizes after every substep and resets t1 from the analytic
/// tangent. Throws kDegeneratePath if |p_d'| < v_T_min on any substep.
TransportFrame propagate_frame(const BernsteinPath& path,
                               const TransportFrame& frame, double gamma_next,
                               double v_T_min = 1e-9,
                               double max_substep_fraction = 1e-3);

/// Bending coefficients k1 = t2 . t1', k2 = t3 . t1' for the given frame.
void update_bending(const BernsteinPath& path, TransportFrame& frame);

/// kappa = sqrt(k1^2 + k2^2), tau = -d/dgamma atan2(k2, k1). The
/// derivative is a central difference of the unwrapped angle over frames
/// propagated +-h around frame.gamma (one-sided at the ends).
CurvatureTorsion curvature_torsion(const BernsteinPath& path,
                                   const TransportFrame& frame,
                                   double h = 1e-4);

/// omega_T = [0, -k2 gamma_dot, k1 gamma_dot], resolved in T.
Vec3 omega_T(const TransportFrame& frame, double gamma_dot);

/// Samples `samples` points uniformly (at least 1000) and checks
/// v_T_min <= |p_d'| <= v_T_max and sqrt(k1^2 + k2^2) <= omega_T_max.
PathBoundsReport validate_bounds(const BernsteinPath& path,
                                 const PathBounds& bounds,
                                 int samples = 1000);

/// JSON {degree, final_time, control_points: [[x,y,z],...]}.
BernsteinPath load_path_json(const std::filesystem::path& file);
BernsteinPath path_from_json_text(const std::string& text);
std::string path_to_json_text(const BernsteinPath& path);
PathBounds load_bounds_json(const std::filesystem::path& file);

}  // namespace auvgnc
