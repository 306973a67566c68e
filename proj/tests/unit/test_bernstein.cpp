#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "auvgnc/bernstein_path.hpp"
#include "auvgnc/error.hpp"
#include "auvgnc/scenario.hpp"
#include "oracles.hpp"

using namespace auvgnc;

namespace {

BernsteinPath line10() { return BernsteinPath({Vec3(0, 0, 0), Vec3(10, 0, 0)}, 10.0); }

BernsteinPath random_path(std::mt19937_64& rng, int degree, double tf) {
  std::vector<Vec3> pts;
  for (int j = 0; j <= degree; ++j) {
    pts.push_back(Vec3(10.0 * j, 0, 0) + oracle::random_vec3(rng, 4.0));
  }
  return BernsteinPath(std::move(pts), tf);
}

// Helix-like cubic: climbing, turning curve with nonzero torsion.
BernsteinPath helical_cubic() {
  return BernsteinPath({Vec3(0, 0, 0), Vec3(10, 0, 2), Vec3(10, 10, 6), Vec3(0, 10, 10)},
                       20.0);
}

double frenet_torsion(const BernsteinPath& p, double g) {
  const Vec3 d1 = p.derivative(g, 1), d2 = p.derivative(g, 2), d3 = p.derivative(g, 3);
  const Vec3 c = d1.cross(d2);
  return c.dot(d3) / c.squaredNorm();
}

}  // namespace

TEST(BernsteinEval, LinearMidpoint) {
  EXPECT_LE((line10().eval(5.0) - Vec3(5, 0, 0)).norm(), 1e-15);
}

TEST(BernsteinEval, EndpointsAreExact) {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 10; ++n) {
    const auto p = random_path(rng, n, 7.3);
    EXPECT_EQ(p.eval(0.0), p.control_points().front());
    EXPECT_EQ(p.eval(7.3), p.control_points().back());
  }
}

TEST(BernsteinEval, MatchesMonomialForm) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 1; n <= 10; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto p = random_path(rng, n, 5.0);
      const double g = 5.0 * u(rng);
      const Vec3 expected = oracle::bernstein_monomial(p.control_points(), 5.0, g);
      const Vec3 direct = oracle::bernstein_direct(p.control_points(), 5.0, g);
      EXPECT_LE((p.eval(g) - expected).norm(), 1e-10 * (1.0 + expected.norm()));
      EXPECT_LE((p.eval(g) - direct).norm(), 1e-10 * (1.0 + direct.norm()));
    }
  }
  const auto q = random_path(rng, 2, 3.0);
  const Vec3 e = oracle::bernstein_direct(q.control_points(), 3.0, 0.37 * 3.0);
  EXPECT_LE((q.eval(0.37 * 3.0) - e).norm(), 1e-12);
}

TEST(BernsteinEval, OutOfRangeThrows) {
  const auto p = line10();
  for (double g : {-1e-9, 10.0 + 1e-9, std::nan("")}) {
    try {
      p.eval(g);
      FAIL() << g;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kGammaOutOfRange);
    }
  }
  EXPECT_THROW(p.derivative(11.0, 1), Error);
}

TEST(BernsteinPath, ConstructorValidates) {
  EXPECT_THROW(BernsteinPath({Vec3::Zero()}, 1.0), Error);
  EXPECT_THROW(BernsteinPath({Vec3::Zero(), Vec3::Ones()}, 0.0), Error);
  EXPECT_THROW(BernsteinPath({Vec3::Zero(), Vec3(NAN, 0, 0)}, 1.0), Error);
}

TEST(BernsteinDerivative, LinearPath) {
  const auto p = line10();
  for (double g : {0.0, 3.3, 10.0}) {
    EXPECT_LE((p.derivative(g, 1) - Vec3(1, 0, 0)).norm(), 1e-15);
    EXPECT_EQ(p.derivative(g, 2), Vec3::Zero());
  }
}

TEST(BernsteinDerivative, MatchesFiniteDifference) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_path(rng, 4, 8.0);
    const double g = 8.0 * u(rng);
    const double h = 1e-4;
    const Vec3 fd1 = oracle::central_diff([&](double x) { return p.eval(x); }, g, h);
    const Vec3 fd2 =
        oracle::central_diff([&](double x) { return p.derivative(x, 1); }, g, h);
    EXPECT_LE((p.derivative(g, 1) - fd1).norm(), 1e-6 * fd1.norm());
    EXPECT_LE((p.derivative(g, 2) - fd2).norm(), 1e-6 * (1.0 + fd2.norm()));
  }
}

TEST(TransportFrame, InitialFrameConvention) {
  const auto f = initial_frame(line10());
  EXPECT_LE((f.R_TI.col(0) - Vec3(1, 0, 0)).norm(), 1e-15);
  EXPECT_LE((f.R_TI.col(2) - Vec3(0, 0, -1)).norm(), 1e-15);
  EXPECT_LE((f.R_TI.col(1) - Vec3(0, -1, 0)).norm(), 1e-15);

  const BernsteinPath vertical({Vec3(0, 0, 0), Vec3(0, 0, -10)}, 10.0);
  const auto fv = initial_frame(vertical);
  EXPECT_LE((fv.R_TI.col(1) - Vec3(0, 1, 0)).norm(), 1e-15);
  EXPECT_NEAR(fv.R_TI.matrix().determinant(), 1.0, 1e-12);
}

TEST(TransportFrame, StraightPathHasNoBending) {
  const BernsteinPath p({Vec3(0, 0, 0), Vec3(3, 4, -1), Vec3(6, 8, -2)}, 5.0);
  auto f = initial_frame(p);
  const Matrix3 r0 = f.R_TI.matrix();
  for (int i = 1; i <= 50; ++i) {
    f = propagate_frame(p, f, 0.1 * i);
    EXPECT_LE(std::abs(f.k1), 1e-10);
    EXPECT_LE(std::abs(f.k2), 1e-10);
    EXPECT_LE((f.R_TI.matrix() - r0).norm(), 1e-12);
  }
  const auto ct = curvature_torsion(p, f);
  EXPECT_LE(ct.kappa, 1e-10);
  EXPECT_EQ(ct.tau, 0.0);
  EXPECT_TRUE(ct.torsion_undefined);
}

TEST(TransportFrame, OrthonormalityOverHundredThousandSubsteps) {
  const auto p = preset_path("canyon");
  const auto f0 = initial_frame(p);
  const auto f = propagate_frame(p, f0, p.final_time(), 1e-9, 1e-5);
  EXPECT_LE(f.R_TI.orthonormality_error(), 1e-6);
  const Vec3 t1 = p.tangent(p.final_time());
  EXPECT_GE(f.R_TI.col(0).dot(t1), 1.0 - 1e-9);
}

TEST(TransportFrame, ChainedPropagationMatchesSingleCall) {
  const auto p = helical_cubic();
  const auto f0 = initial_frame(p);
  const auto once = propagate_frame(p, f0, p.final_time());
  auto chained = f0;
  for (int i = 1; i <= 100; ++i) chained = propagate_frame(p, chained, p.final_time() * i / 100.0);
  EXPECT_LE((once.R_TI.matrix() - chained.R_TI.matrix()).norm(), 1e-6);
  EXPECT_NEAR(once.k1, chained.k1, 1e-6);
  EXPECT_NEAR(once.k2, chained.k2, 1e-6);
}

TEST(TransportFrame, NormalsDoNotSpinAboutTangent) {
  // Parallel transport: t2' and t3' have no component along each other.
  const auto p = helical_cubic();
  auto f = initial_frame(p);
  for (int i = 1; i <= 40; ++i) {
    const double g = 0.5 * i;
    const auto a = propagate_frame(p, f, g - 1e-4);
    const auto b = propagate_frame(p, f, std::min(g + 1e-4, p.final_time()));
    const Vec3 dt2 = (b.R_TI.col(1) - a.R_TI.col(1)) / (b.gamma - a.gamma);
    const auto mid = propagate_frame(p, f, g);
    EXPECT_LE(std::abs(dt2.dot(mid.R_TI.col(2))), 1e-6);
    EXPECT_NEAR(dt2.dot(mid.R_TI.col(0)), -mid.k1, 1e-5);
    f = mid;
  }
}

TEST(TransportFrame, BendingMatchesPolylineCurvature) {
  // Planar quadratic arc; geometric curvature from a dense polyline.
  const BernsteinPath p({Vec3(0, 0, -5), Vec3(50, 0, -5), Vec3(50, 50, -5)}, 10.0);
  auto f = initial_frame(p);
  for (int i = 1; i < 20; ++i) {
    const double g = 0.5 * i;
    f = propagate_frame(p, f, g);
    const double h = 1e-3;
    const double kappa_geom =
        oracle::three_point_curvature(p.eval(g - h), p.eval(g), p.eval(g + h));
    const double bending = std::hypot(f.k1, f.k2) / p.speed(g);
    EXPECT_NEAR(bending, kappa_geom, 1e-5 * kappa_geom);
    EXPECT_LE(std::abs(f.k2), 1e-10);  // planar and level: bending stays in t2
  }
}

TEST(CurvatureTorsion, PlanarPathHasZeroTorsion) {
  const BernsteinPath p({Vec3(0, 0, -5), Vec3(50, 0, -5), Vec3(50, 50, -5), Vec3(0, 60, -5)},
                        10.0);
  const auto f = propagate_frame(p, initial_frame(p), 4.0);
  const auto ct = curvature_torsion(p, f);
  EXPECT_GT(ct.kappa, 0.0);
  EXPECT_LE(std::abs(ct.tau), 1e-9);
  EXPECT_FALSE(ct.torsion_undefined);
}

TEST(CurvatureTorsion, HelicalCubicMatchesFrenetTorsion) {
  const auto p = helical_cubic();
  auto f = initial_frame(p);
  for (int i = 1; i < 10; ++i) {
    const double g = 2.0 * i;
    f = propagate_frame(p, f, g);
    const auto ct = curvature_torsion(p, f, 1e-4);
    // The angle of (k1, k2) turns at the Frenet torsion rate, in virtual time.
    const double expected = -frenet_torsion(p, g) * p.speed(g);
    EXPECT_NEAR(ct.tau, expected, 1e-5 * (1.0 + std::abs(expected))) << g;

    // Same quantity from sampled frames at +-1e-4, independent unwrapping.
    const auto a = propagate_frame(p, f, g - 1e-4);
    const auto b = propagate_frame(p, f, g + 1e-4);
    const double fd = -(std::atan2(b.k2, b.k1) - std::atan2(a.k2, a.k1)) / 2e-4;
    EXPECT_NEAR(ct.tau, fd, 1e-9);
    EXPECT_NEAR(ct.kappa, std::hypot(f.k1, f.k2), 1e-15);
  }
}

TEST(OmegaT, Components) {
  TransportFrame f;
  f.k1 = 0.01;
  f.k2 = 0.0;
  EXPECT_LE((omega_T(f, 2.0) - Vec3(0, 0, 0.02)).norm(), 1e-18);
  const auto straight = initial_frame(line10());
  EXPECT_EQ(omega_T(straight, 3.0), Vec3::Zero());
}

TEST(OmegaT, NormIdentity) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    TransportFrame f;
    f.k1 = u(rng);
    f.k2 = u(rng);
    const double gd = u(rng);
    EXPECT_NEAR(omega_T(f, gd).norm(), std::hypot(f.k1, f.k2) * std::abs(gd), 1e-15);
  }
}

TEST(ValidateBounds, LinearPath) {
  const auto rep = validate_bounds(line10(), {0.5, 2.0, 0.1});
  EXPECT_TRUE(rep.pass);
  EXPECT_DOUBLE_EQ(rep.min_speed, 1.0);
  EXPECT_DOUBLE_EQ(rep.max_speed, 1.0);
  EXPECT_GE(rep.samples, 1000);
  EXPECT_FALSE(validate_bounds(line10(), {1.5, 2.0, 0.1}).pass);
}

TEST(ValidateBounds, DepthStepAgainstDenseOracle) {
  const auto p = preset_path("depth_change");
  const auto rep = validate_bounds(p, {0.1, 100.0, 1.0});
  EXPECT_TRUE(rep.pass);
  double vmin = 1e300, vmax = 0.0, bend = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double g = p.final_time() * i / 100000.0;
    const Vec3 d1 = p.derivative(g, 1), d2 = p.derivative(g, 2);
    vmin = std::min(vmin, d1.norm());
    vmax = std::max(vmax, d1.norm());
    bend = std::max(bend, d1.cross(d2).norm() / d1.squaredNorm());
  }
  EXPECT_NEAR(rep.min_speed, vmin, 1e-3 * vmin);
  EXPECT_NEAR(rep.max_speed, vmax, 1e-3 * vmax);
  EXPECT_NEAR(rep.max_bending, bend, 1e-3 * bend);
}

TEST(Propagate, DegeneratePathThrows) {
  // Coincident middle points make the speed vanish at the midpoint.
  const BernsteinPath p({Vec3(0, 0, 0), Vec3(5, 0, 0), Vec3(0, 0, 0)}, 2.0);
  try {
    propagate_frame(p, initial_frame(p), 2.0, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegeneratePath);
  }
}

TEST(PathJson, RoundTrip) {
  const auto p = preset_path("lane_change");
  const auto q = path_from_json_text(path_to_json_text(p));
  EXPECT_EQ(q.degree(), p.degree());
  EXPECT_EQ(q.final_time(), p.final_time());
  for (int j = 0; j <= p.degree(); ++j) EXPECT_EQ(q.control_points()[j], p.control_points()[j]);
  EXPECT_THROW(path_from_json_text(R"({"degree": 2, "final_time": 1, "control_points": [[0,0,0]]})"),
               Error);
  EXPECT_THROW(path_from_json_text("{"), Error);
}
