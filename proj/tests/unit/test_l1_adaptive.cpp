#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "auvgnc/error.hpp"
#include "auvgnc/l1_adaptive.hpp"
#include "auvgnc/scenario.hpp"
#include "oracles.hpp"

using namespace auvgnc;

namespace {

DesiredSystem scalar_desired(double a, double b) {
  return DesiredSystem::make(tf_to_ss({b}, {1.0, a}));
}

DesiredSystem default_desired() { return DesiredSystem::make(default_l1_config().M.build()); }

LtiSystem default_filter() { return default_l1_config().C.build(); }

DesiredSystem random_desired(std::mt19937_64& rng, int n) {
  const Matrix a = oracle::random_stable(n, rng, 0.3, 4.0);
  Matrix b = Matrix::Random(n, 2);
  Matrix c = Matrix::Random(2, n);
  b.topRows(2) += 2.0 * Matrix::Identity(2, 2);
  c.leftCols(2) += 2.0 * Matrix::Identity(2, 2);
  return DesiredSystem::make(LtiSystem(a, b, c));
}

}  // namespace

TEST(DesiredSystem, DefaultMHasIdentityKg) {
  const auto d = default_desired();
  EXPECT_EQ(d.n(), 2);
  EXPECT_LE((d.sys.A + 0.1 * Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LE((d.K_g - Matrix::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LE((dc_gain(d.sys) * d.K_g - Matrix::Identity(2, 2)).norm(), 1e-12);
}

TEST(DesiredSystem, DcIdentityForRandomSystems) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 100; ++i) {
    const auto d = random_desired(rng, 2 + i % 5);
    const Matrix m0 = -d.sys.C * d.sys.A.inverse() * d.sys.B;
    EXPECT_LE((m0 * d.K_g - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(DesiredSystem, RejectsUnstableAndSingular) {
  try {
    DesiredSystem::make(tf_to_ss({1.0}, {1.0, -1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotHurwitz);
  }
  // Relative degree two: C_m B_m = 0.
  EXPECT_THROW(DesiredSystem::make(tf_to_ss({1.0}, {1.0, 2.0, 1.0})), Error);
}

TEST(BuildGains, ScalarClosedForm) {
  const double a = 0.1, b = 0.1, Ts = 0.05;
  const auto d = scalar_desired(a, b);
  const auto g = build_gains(d, Matrix::Constant(1, 1, 2 * a), Ts);
  EXPECT_NEAR(g.P(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(g.Lambda(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(g.Phi(0, 0), (1.0 - std::exp(-a * Ts)) / a, 1e-14);
}

TEST(BuildGains, Invariants) {
  std::mt19937_64 rng(42);
  for (int n = 2; n <= 6; ++n) {
    const auto d = random_desired(rng, n);
    Matrix q = Matrix::Random(n, n);
    q = q * q.transpose() + Matrix::Identity(n, n);
    const auto g = build_gains(d, q, 0.05);
    const Matrix& am = d.sys.A;
    EXPECT_LE((am.transpose() * g.P + g.P * am + q).norm(), 1e-10 * q.norm());
    EXPECT_LE((g.sqrtP.transpose() * g.sqrtP - g.P).norm(), 1e-10 * g.P.norm());
    EXPECT_EQ(g.D.rows(), n - 2);
    if (n > 2) {
      EXPECT_LE((g.D * (d.sys.C * g.sqrtP.inverse()).transpose()).norm(), 1e-10);
      for (Eigen::Index r = 0; r < g.D.rows(); ++r) {
        Eigen::Index idx = 0;
        g.D.row(r).cwiseAbs().maxCoeff(&idx);
        EXPECT_GT(g.D(r, idx), 0.0);
      }
    }
    EXPECT_LE((g.Lambda.inverse() * g.Lambda - Matrix::Identity(n, n)).norm(), 1e-10);
  }
}

TEST(BuildGains, PhiMatchesQuadrature) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 20; ++i) {
    const int n = 2 + i % 5;
    const auto d = random_desired(rng, n);
    const double Ts = 0.05;
    const auto g = build_gains(d, Matrix::Identity(n, n), Ts);
    const Matrix abar = g.Lambda * d.sys.A * g.Lambda.inverse();
    const Matrix ref = oracle::trapezoid(
        [&](double tau) -> Matrix { return oracle::expm_taylor(abar * (Ts - tau)) * g.Lambda; },
        Ts, 10000);
    EXPECT_LE((g.Phi - ref).norm(), 1e-8 * ref.norm());
  }
}

TEST(BuildGains, Errors) {
  const auto d = default_desired();
  Matrix q = Matrix::Identity(2, 2);
  q(1, 1) = -1.0;
  try {
    build_gains(d, q, 0.05);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonSpdQ);
  }
  EXPECT_THROW(build_gains(d, Matrix::Identity(3, 3), 0.05), Error);
  EXPECT_THROW(build_gains(d, Matrix::Identity(2, 2), 0.0), Error);
}

TEST(Adaptation, ZeroErrorGivesZero) {
  const auto g = build_gains(default_desired(), Matrix::Identity(2, 2), 0.05);
  const Vector y = Vector::Constant(2, 0.3);
  EXPECT_EQ(adaptation_step(g, y, y), Vector::Zero(2));
}

TEST(Adaptation, ScalarClosedForm) {
  const double a = 0.1, Ts = 0.05, e = 0.02;
  const auto g = build_gains(scalar_desired(a, 0.1), Matrix::Constant(1, 1, 2 * a), Ts);
  const Vector s = adaptation_step(g, Vector::Constant(1, e), Vector::Zero(1));
  const double expected = -(a * std::exp(-a * Ts)) / (1.0 - std::exp(-a * Ts)) * e;
  EXPECT_NEAR(s(0), expected, 1e-12 * std::abs(expected));
}

TEST(Adaptation, Linear) {
  const auto g = build_gains(default_desired(), Matrix::Identity(2, 2), 0.02);
  std::mt19937_64 rng(44);
  for (int i = 0; i < 100; ++i) {
    const Vector e = Vector::Random(2);
    const Vector e2 = Vector::Random(2);
    const Vector z = Vector::Zero(2);
    EXPECT_LE((adaptation_step(g, 2.0 * e, z) - 2.0 * adaptation_step(g, e, z)).norm(), 1e-12);
    EXPECT_LE((adaptation_step(g, e + e2, z) - adaptation_step(g, e, z) - adaptation_step(g, e2, z))
                  .norm(),
              1e-12);
  }
}

TEST(Predictor, ZeroStaysZero) {
  const auto d = default_desired();
  const auto g = build_gains(d, Matrix::Identity(2, 2), 0.05);
  Vector x = Vector::Zero(2);
  for (int i = 0; i < 10; ++i) x = predictor_step(d, g, x, Vector::Zero(2), Vector::Zero(2));
  EXPECT_EQ(x, Vector::Zero(2));
}

TEST(Predictor, ScalarExactDiscretization) {
  const double a = 0.5, b = 2.0, Ts = 0.05, u = 0.3;
  const auto d = scalar_desired(a, b);
  const auto g = build_gains(d, Matrix::Constant(1, 1, 1.0), Ts);
  Vector x = Vector::Zero(1);
  for (int i = 1; i <= 200; ++i) {
    x = predictor_step(d, g, x, Vector::Constant(1, u), Vector::Zero(1));
    const double expected = (1.0 - std::exp(-a * Ts * i)) * (b / a) * u;
    EXPECT_NEAR(x(0), expected, 1e-12);
  }
}

TEST(Predictor, MatchedConstantReproducesZoh) {
  std::mt19937_64 rng(45);
  const auto d = random_desired(rng, 4);
  const double Ts = 0.02;
  const auto g = build_gains(d, Matrix::Identity(4, 4), Ts);
  const Vector u = Vector::Random(2), f = Vector::Random(2);
  // Augmented exponential of [[A, B(u+f)], [0, 0]] as the oracle.
  Matrix aug = Matrix::Zero(5, 5);
  aug.topLeftCorner(4, 4) = d.sys.A;
  aug.topRightCorner(4, 1) = d.sys.B * (u + f);
  const Matrix e = oracle::expm_taylor(aug * Ts);
  Vector x = Vector::Random(4);
  for (int i = 0; i < 50; ++i) {
    const Vector next = predictor_step(d, g, x, u, d.sys.B * f);
    const Vector expected = e.topLeftCorner(4, 4) * x + e.topRightCorner(4, 1);
    EXPECT_LE((next - expected).norm(), 1e-12);
    x = next;
  }
}

TEST(Predictor, InitialStateFromPseudoInverse) {
  std::mt19937_64 rng(46);
  const auto d = random_desired(rng, 5);
  const auto g = build_gains(d, Matrix::Identity(5, 5), 0.05);
  const Vector y0 = Vector::Random(2);
  EXPECT_LE((d.sys.C * g.Cm_pinv * y0 - y0).norm(), 1e-12);
}

TEST(Filter, CancellationCase) {
  // M = C = diag(1/(s+1)) -> O = diag(1/(s+1)).
  const auto d = DesiredSystem::make(diagonal_tf({{{1.0}, {1.0, 1.0}}, {{1.0}, {1.0, 1.0}}}));
  const auto o = build_filter(d, diagonal_tf({{{1.0}, {1.0, 1.0}}, {{1.0}, {1.0, 1.0}}}));
  EXPECT_EQ(o.n(), 2);
  for (double t : {0.0, 0.5, 2.0}) {
    const Matrix h = o.C * oracle::expm_taylor(o.A * t) * o.B;
    EXPECT_NEAR(h(0, 0), std::exp(-t), 1e-12);
    EXPECT_NEAR(h(1, 1), std::exp(-t), 1e-12);
    EXPECT_NEAR(h(0, 1), 0.0, 1e-12);
  }
}

TEST(Filter, DefaultFilterDcGain) {
  const auto c = default_filter();
  EXPECT_LE((dc_gain(c) - Matrix::Identity(2, 2)).norm(), 1e-12);
  // Hand arithmetic: 0.1 / (1 * 1 * 0.1) and 0.01^3 / 0.01^3.
  EXPECT_NEAR(oracle::tf_eval({0.1}, {1.0, 2.1, 1.2, 0.1}, 0.0).real(), 1.0, 1e-15);
  EXPECT_NEAR(oracle::tf_eval({1e-6}, {1.0, 0.03, 3e-4, 1e-6}, 0.0).real(), 1.0, 1e-12);
}

TEST(Filter, DefaultFilterMatchesTransferProduct) {
  const auto d = default_desired();
  const auto o = build_filter(d, default_filter());
  EXPECT_TRUE(is_hurwitz(o.A));
  EXPECT_TRUE(o.strictly_proper());
  const std::vector<double> cq_num{0.1}, cq_den{1.0, 2.1, 1.2, 0.1};
  const std::vector<double> cr_num{1e-6}, cr_den{1.0, 0.03, 3e-4, 1e-6};
  for (int k = 0; k < 100; ++k) {
    const double w = std::pow(10.0, -3.0 + 5.0 * k / 99.0);
    const std::complex<double> s(0.0, w);
    // Per channel: C(s) * (s + 0.1)/0.1 * 1/(s + 0.1) = C(s) / 0.1.
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(2, 2);
    expected(0, 0) = oracle::tf_eval(cq_num, cq_den, s) / 0.1;
    expected(1, 1) = oracle::tf_eval(cr_num, cr_den, s) / 0.1;
    const Eigen::MatrixXcd got = frequency_response(o, w);
    EXPECT_LE((got - expected).norm(), 1e-8 * std::max(1.0, expected.norm())) << w;
  }
}

TEST(Filter, Errors) {
  const auto d = default_desired();
  auto code_of = [&](const LtiSystem& c) {
    try {
      build_filter(d, c);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIoError;
  };
  EXPECT_EQ(code_of(diagonal_tf({{{1.0, 1.0}, {1.0, 1.0}}, {{1.0}, {1.0, 1.0}}})),
            ErrorCode::kNonProperFilter);
  EXPECT_EQ(code_of(diagonal_tf({{{2.0}, {1.0, 1.0}}, {{1.0}, {1.0, 1.0}}})),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of(diagonal_tf({{{-1.0}, {1.0, -1.0}}, {{1.0}, {1.0, 1.0}}})),
            ErrorCode::kUnstableFilter);

  // (s - 1)/((s + 1)(s + 2)) has a right-half-plane zero.
  const auto nmp = DesiredSystem::make(tf_to_ss({-1.0, 1.0}, {1.0, 3.0, 2.0}));
  try {
    build_filter(nmp, tf_to_ss({1.0}, {1.0, 1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonMinimumPhaseM);
  }
}

TEST(Control, NoEstimateIsFeedforward) {
  const auto d = default_desired();
  const auto g = build_gains(d, Matrix::Identity(2, 2), 0.05);
  const auto fd = discretize_filter(build_filter(d, default_filter()), g);
  const Vector wc = Vector::Random(2);
  const Vector xu = Vector::Zero(fd.Ao_exp.rows());
  const auto out = control_step(d, fd, xu, wc, Vector::Zero(2));
  EXPECT_LE((out.u - d.K_g * wc).norm(), 1e-15);
  EXPECT_EQ(out.x_u_next, xu);
}

TEST(Control, ConstantEstimateSteadyState) {
  // Scalar: O(0) = C(0) M(0)^-1 C_m (-A_m)^-1 = (a/b)(1/a) = 1/b, and the
  // estimate enters through e^{-A_m Ts} = e^{a Ts}.
  const double a = 0.4, b = 1.0, Ts = 0.05, sigma = 0.7;
  const auto d = scalar_desired(a, b);
  const auto g = build_gains(d, Matrix::Constant(1, 1, 1.0), Ts);
  const auto fd = discretize_filter(build_filter(d, tf_to_ss({2.0}, {1.0, 2.0})), g);
  Vector xu = Vector::Zero(fd.Ao_exp.rows());
  Vector u;
  for (int i = 0; i < 4000; ++i) {
    const auto out = control_step(d, fd, xu, Vector::Zero(1), Vector::Constant(1, sigma));
    u = out.u;
    xu = out.x_u_next;
  }
  EXPECT_NEAR(u(0), -std::exp(a * Ts) * sigma / b, 1e-10);
}

TEST(Controller, RejectsMatchedConstantDisturbance) {
  // Plant x' = -a x + b (u + f) driven by the sampled controller; at steady
  // state the output tracks the command despite f.
  const double a = 1.0, b = 1.0, Ts = 0.01, f = 0.5, r = 0.2;
  L1Controller ctl(scalar_desired(a, b), tf_to_ss({5.0}, {1.0, 5.0}), Matrix::Identity(1, 1), Ts);
  double x = 0.0;
  const int sub = 10;
  const double h = Ts / sub;
  for (int i = 0; i < 3000; ++i) {
    const double u = ctl.step(Vector::Constant(1, x), Vector::Constant(1, r))(0);
    for (int k = 0; k < sub; ++k) {
      auto rate = [&](double s) { return -a * s + b * (u + f); };
      const double k1 = rate(x), k2 = rate(x + 0.5 * h * k1), k3 = rate(x + 0.5 * h * k2),
                   k4 = rate(x + h * k3);
      x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
  }
  EXPECT_NEAR(x, r, 1e-6);
  EXPECT_EQ(ctl.steps(), 3000);
  ctl.reset();
  EXPECT_EQ(ctl.steps(), 0);
  EXPECT_EQ(ctl.x_hat(), Vector::Zero(1));
}

TEST(Controller, SizeMismatchThrows) {
  L1Controller ctl(default_desired(), default_filter(), Matrix::Identity(2, 2), 0.05);
  EXPECT_THROW(ctl.step(Vector::Zero(3), Vector::Zero(2)), Error);
}
