#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "isofocus/error.hpp"
#include "isofocus/params.hpp"

using namespace isofocus;

namespace {

// Eigen-slopes s of the autonomous field (dxi, dU) = ((U - xi)^2 - a^2, a^2 (beta + m U / xi))
// at P_w; the departure slope along each direction is s = 1 - lambda.
std::array<double, 2> jacobian_lambdas(const SimilarityParams& p, double xi, double U) {
  const double a = p.a(), m = p.m();
  const double j11 = -2.0 * (U - xi), j12 = 2.0 * (U - xi);
  const double j21 = -a * a * m * U / (xi * xi), j22 = a * a * m / xi;
  // Eigenvector (1, s): j21 + j22 s = (j11 + j12 s) s.
  const double qa = j12, qb = j11 - j22, qc = -j21;
  const double disc = std::sqrt(qb * qb - 4.0 * qa * qc);
  const double s1 = (-qb + disc) / (2.0 * qa), s2 = (-qb - disc) / (2.0 * qa);
  const double l1 = 1.0 - s1, l2 = 1.0 - s2;
  return {std::max(l1, l2), std::min(l1, l2)};
}

double bound_by_quadrature(const SimilarityParams& p) {
  const auto cp = critical_points(p);
  const double c = p.a() + cp.U_w;
  boost::math::quadrature::exp_sinh<double> q;
  const double I = q.integrate([&](double s) {
    const double xi = cp.xi_w - s;
    return 1.0 / (xi * (xi - c));
  });
  return cp.U_w + p.a() * p.a() * p.m() * I;
}

}  // namespace

TEST(CriticalPoints, SphericalReferenceExact) {
  const auto p = SimilarityParams::make(2, -1.0);
  const auto cp = critical_points(p);
  EXPECT_EQ(cp.xi_w, -2.0);
  EXPECT_EQ(cp.U_w, -1.0);
  EXPECT_NEAR(cp.radicand, 1.25, 1e-15);
  const auto oracle = jacobian_lambdas(p, cp.xi_w, cp.U_w);
  EXPECT_NEAR(cp.lambda_plus, oracle[0], 1e-12);
  EXPECT_NEAR(cp.lambda_minus, oracle[1], 1e-12);
  EXPECT_NEAR(cp.lambda_plus, 1.309017, 1e-6);
  EXPECT_NEAR(cp.lambda_minus, 0.190983, 1e-6);
  EXPECT_DOUBLE_EQ(cp.dir_plus[0], 1.0);
  EXPECT_NEAR(cp.dir_plus[1], 1.0 - cp.lambda_plus, 1e-15);
  EXPECT_NEAR(cp.dir_minus[1], 1.0 - cp.lambda_minus, 1e-15);
}

TEST(CriticalPoints, CylindricalReference) {
  const auto p = SimilarityParams::make(1, -0.5);
  const auto cp = critical_points(p);
  EXPECT_EQ(cp.xi_w, -2.0);
  EXPECT_EQ(cp.U_w, -1.0);
  const auto oracle = jacobian_lambdas(p, cp.xi_w, cp.U_w);
  EXPECT_NEAR(cp.lambda_plus, oracle[0], 1e-12);
  EXPECT_NEAR(cp.lambda_minus, oracle[1], 1e-12);
  EXPECT_NEAR(cp.lambda_plus, 1.140388, 1e-6);
  EXPECT_NEAR(cp.lambda_minus, 0.109612, 1e-6);
}

TEST(CriticalPoints, NodeStructureOverSweep) {
  for (int m : {1, 2}) {
    for (int k = 1; k < 40; ++k) {
      const double beta = -m * k / 40.0;
      for (double a : {0.5, 1.0, 3.0}) {
        const auto p = SimilarityParams::make(m, beta, a);
        const auto cp = critical_points(p);
        SCOPED_TRACE("m=" + std::to_string(m) + " beta=" + std::to_string(beta));
        EXPECT_LT(cp.xi_w, 0.0);
        EXPECT_LT(cp.U_w, 0.0);
        EXPECT_NEAR(cp.U_w, cp.xi_w + a, 1e-14 * a);
        EXPECT_NEAR(beta + m * cp.U_w / cp.xi_w, 0.0, 1e-14);
        EXPECT_GT(cp.radicand, 0.0);
        EXPECT_GT(cp.lambda_minus, 0.0);
        EXPECT_LT(cp.lambda_minus, cp.lambda_plus);
        EXPECT_LT(1.0 - cp.lambda_plus, 0.0);
        EXPECT_LT(-p.mu(), 1.0 - cp.lambda_minus);
        EXPECT_LT(1.0 - cp.lambda_minus, 1.0);
        const auto oracle = jacobian_lambdas(p, cp.xi_w, cp.U_w);
        EXPECT_NEAR(cp.lambda_plus, oracle[0], 1e-12);
        EXPECT_NEAR(cp.lambda_minus, oracle[1], 1e-12);
      }
    }
  }
}

TEST(CriticalPoints, SoundSpeedScaling) {
  const auto c1 = critical_points(SimilarityParams::make(2, -1.0, 1.0));
  const auto c2 = critical_points(SimilarityParams::make(2, -1.0, 2.5));
  EXPECT_NEAR(c2.xi_w, 2.5 * c1.xi_w, 1e-14);
  EXPECT_NEAR(c2.U_w, 2.5 * c1.U_w, 1e-14);
  EXPECT_NEAR(c2.lambda_plus, c1.lambda_plus, 1e-14);
  EXPECT_NEAR(c2.lambda_minus, c1.lambda_minus, 1e-14);
}

TEST(Params, RejectsOutOfRange) {
  auto kind_of = [](int m, double beta, double a) {
    try {
      (void)SimilarityParams::make(m, beta, a);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  EXPECT_EQ(kind_of(2, -2.5, 1.0), ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of(2, 0.0, 1.0), ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of(1, -1.0, 1.0), ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of(3, -1.0, 1.0), ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of(2, -1.0, 0.0), ErrorKind::InvalidParams);
  EXPECT_EQ(kind_of(2, std::numeric_limits<double>::quiet_NaN(), 1.0), ErrorKind::InvalidParams);
}

TEST(Params, BetaMessageNamesBound) {
  try {
    (void)SimilarityParams::make(2, -2.5);
    FAIL() << "expected InvalidParams";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("β out of (−m,0)"), std::string::npos) << e.what();
  }
}

TEST(Params, DerivedQuantities) {
  const auto p = SimilarityParams::make(2, -1.0);
  EXPECT_EQ(p.n(), 3);
  EXPECT_EQ(p.mu(), -0.5);
  EXPECT_GT(p.beta() + p.m(), 0.0);
  EXPECT_GT(p.beta() + p.n(), 0.0);
}

TEST(UstarBound, SpecialValues) {
  EXPECT_NEAR(ustar_bound(SimilarityParams::make(2, -1.0)), 0.0, 1e-12);
  EXPECT_NEAR(ustar_bound(SimilarityParams::make(1, -0.5)), -0.5, 1e-12);
}

TEST(UstarBound, MatchesQuadrature) {
  for (int m : {1, 2}) {
    for (double frac : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      for (double a : {1.0, 2.0}) {
        const auto p = SimilarityParams::make(m, -m * frac, a);
        EXPECT_NEAR(ustar_bound(p), bound_by_quadrature(p), 1e-10 * a)
            << "m=" << m << " beta=" << p.beta() << " a=" << a;
      }
    }
  }
}
