#include "auvgnc/bernstein_path.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "auvgnc/error.hpp"

namespace auvgnc {

namespace {

Vec3 de_casteljau(std::vector<Vec3> pts, double s) {
  const std::size_t n = pts.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      pts[i] = (1.0 - s) * pts[i] + s * pts[i + 1];
    }
  }
  return pts.front();
}

}  // namespace

BernsteinPath::BernsteinPath(std::vector<Vec3> control_points,
                             double final_time)
    : points_(std::move(control_points)), final_time_(final_time) {
  if (points_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "Bernstein path needs degree >= 1 (at least 2 control points)");
  }
  if (!(final_time_ > 0.0) || !std::isfinite(final_time_)) {
    throw Error(ErrorCode::kInvalidArgument, "final_time must be positive");
  }
  for (const auto& p : points_) {
    if (!p.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite control point");
    }
  }
  // Derivative coefficients up to order 3 (or N, whichever is lower).
  const int n = degree();
  hodo_.push_back(points_);
  for (int k = 1; k <= std::min(n, 3); ++k) {
    const auto& prev = hodo_.back();
    std::vector<Vec3> next(prev.size() - 1);
    const double scale = static_cast<double>(n - k + 1) / final_time_;
    for (std::size_t j = 0; j + 1 < prev.size(); ++j) {
      next[j] = scale * (prev[j + 1] - prev[j]);
    }
    hodo_.push_back(std::move(next));
  }
}

void BernsteinPath::check_gamma(double gamma) const {
  if (!(gamma >= 0.0 && gamma <= final_time_)) {
    std::ostringstream os;
    os << "gamma = " << gamma << " outside [0, " << final_time_ << "]";
    throw Error(ErrorCode::kGammaOutOfRange, os.str());
  }
}

Vec3 BernsteinPath::eval(double gamma) const {
  check_gamma(gamma);
  if (gamma == 0.0) return points_.front();
  if (gamma == final_time_) return points_.back();
  return de_casteljau(points_, gamma / final_time_);
}

Vec3 BernsteinPath::derivative(double gamma, int order) const {
  check_gamma(gamma);
  if (order < 1 || order > 3) {
    throw Error(ErrorCode::kInvalidArgument, "derivative order must be 1..3");
  }
  if (order > degree()) return Vec3::Zero();
  return de_casteljau(hodo_[order], gamma / final_time_);
}

Vec3 BernsteinPath::tangent(double gamma, double min_speed) const {
  const Vec3 d1 = derivative(gamma, 1);
  const double speed = d1.norm();
  if (!(speed >= min_speed) || speed == 0.0) {
    std::ostringstream os;
    os << "|p_d'| = " << speed << " at gamma = " << gamma;
    throw Error(ErrorCode::kDegeneratePath, os.str());
  }
  return d1 / speed;
}

Vec3 BernsteinPath::tangent_derivative(double gamma) const {
  const Vec3 d1 = derivative(gamma, 1);
  const Vec3 d2 = derivative(gamma, 2);
  const double speed = d1.norm();
  if (!(speed > 0.0)) {
    throw Error(ErrorCode::kDegeneratePath, "zero path speed");
  }
  const Vec3 t1 = d1 / speed;
  return (d2 - t1 * t1.dot(d2)) / speed;
}

void update_bending(const BernsteinPath& path, TransportFrame& frame) {
  const Vec3 dt1 = path.tangent_derivative(frame.gamma);
  frame.k1 = frame.R_TI.col(1).dot(dt1);
  frame.k2 = frame.R_TI.col(2).dot(dt1);
}

TransportFrame frame_with_normal(const BernsteinPath& path, double gamma,
                                 const Vec3& seed_normal) {
  const Vec3 t1 = path.tangent(gamma);
  Vec3 t3 = seed_normal - seed_normal.dot(t1) * t1;
  if (t3.norm() < 1e-6 * seed_normal.norm()) {
    throw Error(ErrorCode::kInvalidArgument, "seed normal parallel to tangent");
  }
  t3.normalize();
  const Vec3 t2 = t3.cross(t1);
  TransportFrame frame;
  frame.gamma = gamma;
  frame.R_TI = Rotation3::from_two_columns(t1, t2);
  update_bending(path, frame);
  return frame;
}

TransportFrame initial_frame(const BernsteinPath& path) {
  const Vec3 t1 = path.tangent(0.0);
  const Vec3 down(0.0, 0.0, -1.0);
  if ((down - down.dot(t1) * t1).norm() > 1e-6) {
    return frame_with_normal(path, 0.0, down);
  }
  // Vertical tangent: seed t2 with world +y instead.
  const Vec3 y_axis(0.0, 1.0, 0.0);
  Vec3 t2 = y_axis - y_axis.dot(t1) * t1;
  t2.normalize();
  TransportFrame frame;
  frame.gamma = 0.0;
  frame.R_TI = Rotation3::from_two_columns(t1, t2);
  update_bending(path, frame);
  return frame;
}

namespace {

struct NormalPair {
  Vec3 t2;
  Vec3 t3;
};

NormalPair normals_rate(const BernsteinPath& path, double gamma,
                        const NormalPair& n, double v_min) {
  const Vec3 d1 = path.derivative(gamma, 1);
  const double speed = d1.norm();
  if (!(speed >= v_min) || speed == 0.0) {
    std::ostringstream os;
    os << "|p_d'| = " << speed << " below " << v_min << " at gamma = " << gamma;
    throw Error(ErrorCode::kDegeneratePath, os.str());
  }
  const Vec3 t1 = d1 / speed;
  const Vec3 d2 = path.derivative(gamma, 2);
  const Vec3 dt1 = (d2 - t1 * t1.dot(d2)) / speed;
  return {-n.t2.dot(dt1) * t1, -n.t3.dot(dt1) * t1};
}

}  // namespace

TransportFrame propagate_frame(const BernsteinPath& path,
                               const TransportFrame& frame, double gamma_next,
                               double v_T_min, double max_substep_fraction) {
  const double tf = path.final_time();
  if (!(gamma_next >= 0.0 && gamma_next <= tf)) {
    std::ostringstream os;
    os << "gamma_next = " << gamma_next << " outside [0, " << tf << "]";
    throw Error(ErrorCode::kGammaOutOfRange, os.str());
  }
  const double span = gamma_next - frame.gamma;
  const double max_h = max_substep_fraction * tf;
  const int steps =
      std::max(1, static_cast<int>(std::ceil(std::abs(span) / max_h - 1e-12)));
  const double h = span / steps;

  NormalPair n{frame.R_TI.col(1), frame.R_TI.col(2)};
  double g = frame.gamma;
  Rotation3 r = frame.R_TI;
  for (int i = 0; i < steps; ++i) {
    const double g_end = (i + 1 == steps) ? gamma_next : g + h;
    const double hh = g_end - g;
    const double g_mid = std::clamp(g + 0.5 * hh, 0.0, tf);
    const NormalPair k1 = normals_rate(path, g, n, v_T_min);
    const NormalPair k2 = normals_rate(
        path, g_mid, {n.t2 + 0.5 * hh * k1.t2, n.t3 + 0.5 * hh * k1.t3},
        v_T_min);
    const NormalPair k3 = normals_rate(
        path, g_mid, {n.t2 + 0.5 * hh * k2.t2, n.t3 + 0.5 * hh * k2.t3},
        v_T_min);
    const NormalPair k4 = normals_rate(
        path, g_end, {n.t2 + hh * k3.t2, n.t3 + hh * k3.t3}, v_T_min);
    n.t2 += hh / 6.0 * (k1.t2 + 2.0 * k2.t2 + 2.0 * k3.t2 + k4.t2);
    n.t3 += hh / 6.0 * (k1.t3 + 2.0 * k2.t3 + 2.0 * k3.t3 + k4.t3);
    g = g_end;

    const Vec3 t1 = path.tangent(g, v_T_min);
    r = Rotation3::from_two_columns(t1, n.t2);
    // Keep the propagated t3 sign consistent with the orthonormal frame.
    n.t2 = r.col(1);
    n.t3 = r.col(2);
  }

  TransportFrame out;
  out.gamma = gamma_next;
  out.R_TI = r;
  update_bending(path, out);
  return out;
}

CurvatureTorsion curvature_torsion(const BernsteinPath& path,
                                   const TransportFrame& frame, double h) {
  CurvatureTorsion out;
  out.kappa = std::hypot(frame.k1, frame.k2);
  constexpr double kZeroBending = 1e-12;

  const double tf = path.final_time();
  const double g_lo = std::max(0.0, frame.gamma - h);
  const double g_hi = std::min(tf, frame.gamma + h);
  const TransportFrame lo = propagate_frame(path, frame, g_lo);
  const TransportFrame hi = propagate_frame(path, frame, g_hi);
  if (out.kappa < kZeroBending || std::hypot(lo.k1, lo.k2) < kZeroBending ||
      std::hypot(hi.k1, hi.k2) < kZeroBending || g_hi <= g_lo) {
    out.tau = 0.0;
    out.torsion_undefined = true;
    return out;
  }
  double dtheta = std::atan2(hi.k2, hi.k1) - std::atan2(lo.k2, lo.k1);
  // Unwrap into (-pi, pi].
  while (dtheta > std::numbers::pi) dtheta -= 2.0 * std::numbers::pi;
  while (dtheta <= -std::numbers::pi) dtheta += 2.0 * std::numbers::pi;
  out.tau = -dtheta / (g_hi - g_lo);
  return out;
}

Vec3 omega_T(const TransportFrame& frame, double gamma_dot) {
  return Vec3(0.0, -frame.k2 * gamma_dot, frame.k1 * gamma_dot);
}

PathBoundsReport validate_bounds(const BernsteinPath& path,
                                 const PathBounds& bounds, int samples) {
  samples = std::max(samples, 1000);
  PathBoundsReport rep;
  rep.samples = samples;
  rep.min_speed = std::numeric_limits<double>::infinity();
  rep.max_speed = 0.0;
  rep.max_bending = 0.0;
  const double tf = path.final_time();
  for (int i = 0; i < samples; ++i) {
    const double g = tf * static_cast<double>(i) / (samples - 1);
    const Vec3 d1 = path.derivative(g, 1);
    const double speed = d1.norm();
    rep.min_speed = std::min(rep.min_speed, speed);
    rep.max_speed = std::max(rep.max_speed, speed);
    if (speed > 0.0) {
      // sqrt(k1^2 + k2^2) = |t1'| for any transport frame.
      const Vec3 d2 = path.derivative(g, 2);
      const Vec3 t1 = d1 / speed;
      const Vec3 dt1 = (d2 - t1 * t1.dot(d2)) / speed;
      rep.max_bending = std::max(rep.max_bending, dt1.norm());
    } else {
      rep.max_bending = std::numeric_limits<double>::infinity();
    }
  }
  rep.pass = bounds.v_T_min > 0.0 && rep.min_speed >= bounds.v_T_min &&
             rep.max_speed <= bounds.v_T_max &&
             rep.max_bending <= bounds.omega_T_max;
  return rep;
}

namespace {

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + file.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BernsteinPath path_from_json(const nlohmann::json& j) {
  try {
    const int degree = j.at("degree").get<int>();
    const double tf = j.at("final_time").get<double>();
    const auto& cps = j.at("control_points");
    if (!cps.is_array() || static_cast<int>(cps.size()) != degree + 1) {
      throw Error(ErrorCode::kConfigError,
                  "control_points must hold degree + 1 entries");
    }
    std::vector<Vec3> pts;
    for (const auto& cp : cps) {
      if (!cp.is_array() || cp.size() != 3) {
        throw Error(ErrorCode::kConfigError, "control point must be [x,y,z]");
      }
      pts.emplace_back(cp[0].get<double>(), cp[1].get<double>(),
                       cp[2].get<double>());
    }
    BernsteinPath path(std::move(pts), tf);
    // Ingest check: the path must have a nonvanishing tangent everywhere.
    const auto rep = validate_bounds(path, {1e-9, 1e300, 1e300});
    if (!rep.pass) {
      throw Error(ErrorCode::kDegeneratePath,
                  "path speed vanishes somewhere on [0, T_f]");
    }
    return path;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("path JSON: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument) {
      throw Error(ErrorCode::kConfigError, e.what());
    }
    throw;
  }
}

}  // namespace

BernsteinPath path_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("path JSON: ") + e.what());
  }
  return path_from_json(j);
}

BernsteinPath load_path_json(const std::filesystem::path& file) {
  return path_from_json_text(read_file(file));
}

std::string path_to_json_text(const BernsteinPath& path) {
  nlohmann::json j;
  j["degree"] = path.degree();
  j["final_time"] = path.final_time();
  nlohmann::json cps = nlohmann::json::array();
  for (const auto& p : path.control_points()) {
    cps.push_back({p.x(), p.y(), p.z()});
  }
  j["control_points"] = cps;
  return j.dump(2);
}

PathBounds load_bounds_json(const std::filesystem::path& file) {
  try {
    const auto j = nlohmann::json::parse(read_file(file));
    PathBounds b;
    b.v_T_min = j.at("v_T_min").get<double>();
    b.v_T_max = j.at("v_T_max").get<double>();
    b.omega_T_max = j.at("omega_T_max").get<double>();
    if (!(b.v_T_min > 0.0 && b.v_T_min <= b.v_T_max && b.omega_T_max > 0.0)) {
      throw Error(ErrorCode::kConfigError,
                  "bounds need 0 < v_T_min <= v_T_max and omega_T_max > 0");
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError,
                std::string("bounds JSON: ") + e.what());
  }
}

}  // namespace auvgnc
