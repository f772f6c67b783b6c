#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "isofocus/error.hpp"
#include "isofocus/similarity_ode.hpp"
#include "isofocus/velocity.hpp"
#include "reference.hpp"

using namespace isofocus;
using isofocus::fixtures::cylindrical;
using isofocus::fixtures::spherical;

namespace {

// Sign scan of U_tilde - H on a uniform grid, then plain bisection on the largest bracket.
double shock_by_scan(const VelocityProfile& v, int points) {
  const auto& p = v.params();
  auto g = [&](double xi) { return v.tilde().U(xi) - hugoniot(xi, v.hat(), p); };
  const double lo = std::max(v.xi_star(), v.tilde().lo()), hi = -v.xi_w();
  double best_a = 0.0, best_b = 0.0;
  double prev = g(lo);
  for (int i = 1; i <= points; ++i) {
    const double x = lo + (hi - lo) * i / points;
    const double cur = g(x);
    if ((prev > 0.0) != (cur > 0.0)) {
      best_a = lo + (hi - lo) * (i - 1) / points;
      best_b = x;
    }
    prev = cur;
  }
  double a = best_a, b = best_b;
  const bool ga = g(a) > 0.0;
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double m = 0.5 * (a + b);
    ((g(m) > 0.0) == ga ? a : b) = m;
  }
  return 0.5 * (a + b);
}

}  // namespace

TEST(Hat, ThroughOriginAndNode) {
  const auto& v = spherical().velocity();
  EXPECT_NEAR(v.hat().U(0.0), 0.0, 1e-14);
  EXPECT_NEAR(v.hat().dU(0.0), 1.0 / 3.0, 1e-8);
  EXPECT_NEAR(v.hat().U(v.xi_w()), -1.0, 1e-10);
  EXPECT_NEAR(v.hat().U(-v.xi_w()), 1.0, 1e-10);
}

TEST(Hat, BetweenOmegaAndSonicLine) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto& v = sol->velocity();
    const auto& p = sol->params();
    const double w = -v.xi_w();
    for (int i = 1; i < 1000; ++i) {
      const double xi = -w + w * i / 1000.0;
      const double U = v.hat().U(xi);
      ASSERT_LT(U, xi + p.a()) << xi;
      ASSERT_GT(U, -p.mu() * xi) << xi;
    }
  }
}

TEST(Kink, StaysAboveNodeValueAndDecreasing) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto& v = sol->velocity();
    const auto& p = sol->params();
    const double Uw = critical_points(p).U_w;
    const auto& s = v.kink().samples();
    ASSERT_GT(s.size(), 10u);
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (s[i].xi >= v.xi_w()) continue;
      EXPECT_GT(s[i].U, Uw);
      EXPECT_GE(s[i].U + 1e-14, s[i + 1].U);
      EXPECT_TRUE(classify_region({s[i].xi, s[i].U}, p).in_kink_region) << s[i].xi;
    }
  }
}

TEST(Kink, AssumptionHoldsAndBoundIsStrict) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const double us = sol->velocity().u_star();
    EXPECT_LT(us, 0.0);
    EXPECT_LT(us, ustar_bound(sol->params()));
  }
}

TEST(Kink, UstarStableUnderTruncationAndTolerance) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto& p = sol->params();
    const double us = sol->velocity().u_star();
    const double xi_min = sol->velocity().kink_build().xi_min;
    const auto doubled = build_kink(p, sol->options(), 2.0 * xi_min);
    EXPECT_NEAR(doubled.u_star, us, 1e-8);
    const auto tenfold = build_kink(p, sol->options(), 10.0 * xi_min);
    EXPECT_NEAR(tenfold.u_star, us, 1e-8);
    ConstructionOptions tight = sol->options();
    tight.ode_rtol *= 0.5;
    tight.ode_atol *= 0.5;
    EXPECT_NEAR(build_kink(p, tight).u_star, us, 1e-8);
  }
}

TEST(Kink, AssumptionViolatedIsReported) {
  try {
    (void)build_kink(SimilarityParams::make(2, -0.3));
    FAIL() << "expected AssumptionViolated";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AssumptionViolated);
  }
}

TEST(Hugoniot, NodeClosure) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto& v = sol->velocity();
    const auto cp = critical_points(sol->params());
    EXPECT_NEAR(hugoniot(-cp.xi_w, v.hat(), sol->params()) + cp.U_w, 0.0, 1e-8);
  }
}

TEST(Hugoniot, BelowSonicLine) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto& v = sol->velocity();
    const double a = sol->params().a();
    const double w = -v.xi_w();
    // Equality holds only at the node xi = -xi_w.
    for (int i = 1; i <= 1000; ++i) {
      const double xi = w * i / 1001.0;
      ASSERT_LT(hugoniot(xi, v.hat(), sol->params()), xi - a) << xi;
    }
  }
}

TEST(Hugoniot, DivergesAtOrigin) {
  const auto& sol = spherical();
  double prev = hugoniot(1.0, sol.velocity().hat(), sol.params());
  for (int k = 1; k <= 30; ++k) {
    const double xi = std::pow(10.0, -0.1 * k);
    const double h = hugoniot(xi, sol.velocity().hat(), sol.params());
    EXPECT_LT(h, prev) << xi;
    prev = h;
  }
  EXPECT_LT(prev, -100.0);
  EXPECT_LT(hugoniot(0.01, sol.velocity().hat(), sol.params()), 0.01 - 1.0);
}

TEST(Hugoniot, DomainChecked) {
  const auto& sol = spherical();
  EXPECT_THROW((void)hugoniot(0.0, sol.velocity().hat(), sol.params()), Error);
  EXPECT_THROW((void)hugoniot(2.5, sol.velocity().hat(), sol.params()), Error);
}

TEST(Tilde, SonicCrossingAndOrdering) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto& v = sol->velocity();
    EXPECT_GT(v.xi_star(), 0.0);
    EXPECT_LT(v.xi_star(), v.xi_s());
    EXPECT_LT(v.xi_s(), -v.xi_w());
    const auto& s = v.tilde().samples();
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      if (s[i].xi < v.xi_s()) continue;
      EXPECT_GT(s[i].U, s[i + 1].U);
    }
    EXPECT_NEAR(v.U(1e8), v.u_star(), 1e-7);
  }
}

TEST(Tilde, TailMatchesLeadingBalance) {
  const auto& sol = spherical();
  const auto& tb = sol.velocity().tilde_build();
  const double a2 = 1.0, beta = sol.params().beta();
  const double xm = tb.xi_max;
  EXPECT_NEAR(sol.velocity().tilde().U(xm) - sol.velocity().u_star(), -a2 * beta / xm, 10.0 / (xm * xm));
}

TEST(Tilde, BelowMirroredKink) {
  const auto& v = spherical().velocity();
  EXPECT_LT(v.tilde().U(2.0), -v.kink().U(-2.0));
  EXPECT_NEAR(-v.kink().U(-2.0), 1.0, 1e-10);
  for (double xi = std::max(v.xi_s(), -v.xi_w()); xi < 50.0; xi += 0.25) EXPECT_LT(v.tilde().U(xi), -v.kink().U(-xi));
}

TEST(Shock, MatchesScanOracle) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto& v = sol->velocity();
    EXPECT_NEAR(shock_by_scan(v, 20000), v.xi_s(), 1e-8);
    EXPECT_GE(v.shock().root_count, 1u);
  }
}

TEST(Shock, BracketSigns) {
  const auto& v = spherical().velocity();
  const auto& p = spherical().params();
  auto g = [&](double xi) { return v.tilde().U(xi) - hugoniot(xi, v.hat(), p); };
  EXPECT_GT(g(std::max(v.xi_star(), v.tilde().lo())), 0.0);
  EXPECT_LT(g(-v.xi_w()), 0.0);
}

TEST(Shock, TwoShockAdmissibility) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto& s = sol->velocity().shock();
    const double a = sol->params().a();
    EXPECT_EQ(s.family, ShockFamily::TwoShock);
    EXPECT_LE(std::abs(s.V_plus * s.V_minus - a * a), 1e-10);
    EXPECT_GT(s.U_minus, s.xi_bar - a);
    EXPECT_GT(s.xi_bar - a, s.U_plus);
    EXPECT_GT(s.margin_inner, 0.0);
    EXPECT_GT(s.margin_outer, 0.0);
    EXPECT_GT(s.U_minus, s.U_plus);
  }
  EXPECT_EQ(classify_shock(1.0, 0.5, -1.0, 1.0), ShockFamily::TwoShock);
  EXPECT_EQ(classify_shock(1.0, -1.0, 0.5, 1.0), ShockFamily::Inadmissible);
}

TEST(Profile, StagnationForSphericalReference) { EXPECT_TRUE(spherical().velocity().stagnation()); }

TEST(Profile, KinkIsWeakDiscontinuity) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto& v = sol->velocity();
    const double xw = v.xi_w(), h = 1e-6 * std::abs(xw);
    EXPECT_NEAR(v.U(xw - h), v.U(xw + h), 1e-5);
    const double left = (v.U(xw - 0.01) - v.U(xw - 0.02)) / 0.01;
    const double right = (v.U(xw + 0.02) - v.U(xw + 0.01)) / 0.01;
    EXPECT_GT(std::abs(left - right), 0.1);
  }
}

TEST(Profile, ResidualWithinTolerance) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    EXPECT_LE(sol->velocity().max_residual(), 10.0 * sol->options().ode_rtol);
  }
}

TEST(Profile, PieceSelection) {
  const auto& v = spherical().velocity();
  EXPECT_EQ(v.piece(-3.0), VelocityPiece::Kink);
  EXPECT_EQ(v.piece(-1.0), VelocityPiece::Hat);
  EXPECT_EQ(v.piece(v.xi_s()), VelocityPiece::Hat);
  EXPECT_EQ(v.piece(v.xi_s() + 1e-9), VelocityPiece::Tilde);
}

TEST(Profile, SoundSpeedScaling) {
  const auto v1 = build_velocity_profile(SimilarityParams::make(2, -1.0, 1.0));
  const auto v2 = build_velocity_profile(SimilarityParams::make(2, -1.0, 2.0));
  EXPECT_NEAR(v2.u_star(), 2.0 * v1.u_star(), 1e-8);
  EXPECT_NEAR(v2.xi_s(), 2.0 * v1.xi_s(), 1e-8);
  EXPECT_NEAR(v2.U(-3.0), 2.0 * v1.U(-1.5), 1e-8);
}
