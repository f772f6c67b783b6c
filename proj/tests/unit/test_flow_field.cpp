#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isofocus/error.hpp"
#include "isofocus/flow_field.hpp"
#include "reference.hpp"

using namespace isofocus;
using isofocus::fixtures::cylindrical;
using isofocus::fixtures::rel_diff;
using isofocus::fixtures::spherical;

namespace {

// Direct r-quadrature of rho |u|^q r^m, split at the wave radii.
double moment_by_r_quadrature(const SimilaritySolution& sol, double t, double r_bar, int q) {
  using boost::math::quadrature::gauss_kronrod;
  const int m = sol.params().m();
  std::vector<double> cuts{0.0};
  for (double rw : {sol.kink_radius(t), sol.shock_radius(t)}) {
    if (std::isfinite(rw) && rw > 0.0 && rw < r_bar) cuts.push_back(rw);
  }
  cuts.push_back(r_bar);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], len = cuts[i + 1] - cuts[i];
    total += gauss_kronrod<double, 61>::integrate(
        [&](double x) {
          const double r = lo + len * x;
          if (r <= 0.0) return 0.0;
          const auto f = sol.evaluate(t, r);
          return f.rho * std::pow(std::abs(f.u), q) * std::pow(r, m) * len;
        },
        0.0, 1.0, 15, 1e-14);
  }
  return total;
}

}  // namespace

TEST(Evaluate, CollapseValues) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto f = sol->evaluate(0.0, 1.0);
    EXPECT_EQ(f.rho, std::abs(sol->density().C_minus()));
    EXPECT_EQ(f.u, sol->velocity().u_star());
    EXPECT_THROW((void)sol->evaluate(0.0, 0.0), Error);
  }
}

TEST(Evaluate, CollapseProfileIsPowerLaw) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const double beta = sol->params().beta();
    const double c = std::abs(sol->density().C_minus());
    const double us = sol->velocity().u_star();
    for (int i = 0; i <= 80; ++i) {
      const double r = std::pow(10.0, -4.0 + 4.0 * i / 80.0);
      const auto f = sol->evaluate(0.0, r);
      EXPECT_LE(rel_diff(f.rho * std::pow(r, -beta), c), 1e-6) << r;
      EXPECT_NEAR(f.u, us, 1e-8);
    }
  }
}

TEST(Evaluate, ApproachesCollapseProfileFromBothSides) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const double beta = sol->params().beta();
    const double c = std::abs(sol->density().C_minus());
    const double us = sol->velocity().u_star();
    for (double r : {0.01, 0.1, 1.0}) {
      for (double t : {-1e-10, 1e-10}) {
        const auto f = sol->evaluate(t, r);
        EXPECT_LE(rel_diff(f.rho * std::pow(r, -beta), c), 1e-6) << "t=" << t << " r=" << r;
        EXPECT_NEAR(f.u, us, 1e-7) << "t=" << t << " r=" << r;
      }
    }
  }
}

TEST(Evaluate, CauchySequencesAtFixedRadius) {
  const auto& sol = spherical();
  for (int side : {-1, 1}) {
    double prev_rho = 0.0, prev_u = 0.0, prev_gap = 1e300;
    for (int k = 4; k <= 30; k += 2) {
      const auto f = sol.evaluate(side * std::ldexp(1.0, -k), 1.0);
      if (k > 4) {
        const double gap = std::abs(f.rho - prev_rho) + std::abs(f.u - prev_u);
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
      }
      prev_rho = f.rho;
      prev_u = f.u;
    }
    EXPECT_LT(prev_gap, 1e-7);
  }
}

TEST(Evaluate, VelocityVanishesAtCentreBeforeCollapse) {
  const auto& sol = spherical();
  // Near r = 0 the velocity is linear in r / t with slope -beta / n.
  const double slope = -sol.params().beta() / sol.params().n();
  for (double t : {-2.0, -1.0, -0.1}) {
    for (double r : {1e-9, 1e-6}) EXPECT_NEAR(sol.u(t, r), slope * r / t, 1e-6 * std::abs(slope * r / t)) << t;
  }
}

TEST(Evaluate, DensityPositive) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    for (double t : {-4.0, -1.0, -0.1, -1e-3, 1e-3, 0.1, 1.0, 4.0}) {
      for (int i = 0; i <= 120; ++i) {
        const double r = std::pow(10.0, -5.0 + 8.0 * i / 120.0);
        ASSERT_GT(sol->rho(t, r), 0.0) << t << " " << r;
      }
    }
  }
}

TEST(Evaluate, KinkBranchSample) {
  const auto& sol = spherical();
  const double xi = 4.0 / -1.0;
  const auto f = sol.evaluate(-1.0, 4.0);
  EXPECT_EQ(f.u, sol.velocity().kink().U(xi));
  EXPECT_NEAR(f.rho, -sol.density().Omega(xi), 1e-15);
  EXPECT_EQ(sol.velocity().piece(xi), VelocityPiece::Kink);
}

TEST(Evaluate, ShockSides) {
  const auto& sol = spherical();
  const auto in = sol.shock_side(1.0, -1), out = sol.shock_side(1.0, 1);
  EXPECT_NEAR(in.u, sol.shock().U_minus, 1e-12);
  EXPECT_NEAR(out.u, sol.shock().U_plus, 1e-12);
  EXPECT_GT(in.rho, out.rho);
  EXPECT_NEAR(sol.shock_radius(2.0), 2.0 * sol.velocity().xi_s(), 1e-14);
  EXPECT_NEAR(sol.kink_radius(-1.0), 2.0, 1e-14);
}

TEST(Integrals, ClosedFormsAtCollapse) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const double bn = sol->params().beta() + sol->params().n();
    const double c = std::abs(sol->density().C_minus());
    const double us = std::abs(sol->velocity().u_star());
    EXPECT_LE(rel_diff(sol->collapse_moment(1.0, 0), c / bn), 1e-15);
    EXPECT_LE(rel_diff(sol->collapse_moment(1.0, 1), c * us / bn), 1e-15);
    EXPECT_LE(rel_diff(sol->collapse_moment(1.0, 2), c * us * us / bn), 1e-15);
    EXPECT_LE(rel_diff(sol->mass_integral(0.0, 1.0), c / bn), 1e-14);
    EXPECT_LE(rel_diff(sol->collapse_moment(2.0, 0), c * std::pow(2.0, bn) / bn), 1e-15);
  }
}

TEST(Integrals, ApproachCollapseValue) {
  const auto& sol = spherical();
  const double target = sol.collapse_moment(1.0, 0);
  for (double t : {-std::ldexp(1.0, -20), std::ldexp(1.0, -20)}) {
    EXPECT_LE(rel_diff(sol.mass_integral(t, 1.0), target), 1e-5) << t;
  }
}

TEST(Integrals, MatchIndependentQuadrature) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    EXPECT_LE(rel_diff(sol->mass_integral(-0.5, 1.0), moment_by_r_quadrature(*sol, -0.5, 1.0, 0)), 1e-7);
    EXPECT_LE(rel_diff(sol->moment_integral(0.5, 1.0, 1), moment_by_r_quadrature(*sol, 0.5, 1.0, 1)), 1e-7);
    EXPECT_LE(rel_diff(sol->moment_integral(-1.0, 1.5, 2), moment_by_r_quadrature(*sol, -1.0, 1.5, 2)), 1e-7);
    EXPECT_LE(rel_diff(sol->moment_integral(2.0, 3.0, 2), moment_by_r_quadrature(*sol, 2.0, 3.0, 2)), 1e-7);
  }
}

TEST(Integrals, MomentOrderingWhenSlow) {
  const auto& sol = spherical();
  for (double t : {-1.0, 0.5}) {
    double umax = 0.0;
    for (int i = 1; i <= 500; ++i) umax = std::max(umax, std::abs(sol.u(t, i / 500.0)));
    if (umax <= 1.0) EXPECT_LE(sol.moment_integral(t, 1.0, 2), sol.moment_integral(t, 1.0, 1));
  }
}

TEST(Energy, DensityFormula) {
  const auto& sol = spherical();
  for (double t : {-1.0, 0.0, 1.0}) {
    const double r = 0.7;
    const auto f = sol.evaluate(t, r);
    const double e = (0.5 * f.rho * f.u * f.u + f.rho * std::log(f.rho)) * r * r;
    EXPECT_NEAR(sol.energy_density(t, r), e, 1e-14 * std::max(1.0, std::abs(e)));
  }
}

TEST(Energy, LocallyIntegrableButUnbounded) {
  const auto& sol = spherical();
  const double e1 = sol.energy_integral(0.0, 1.0);
  EXPECT_TRUE(std::isfinite(e1));
  double prev = std::abs(sol.energy_integral(0.0, 10.0));
  for (double R : {100.0, 1000.0}) {
    const double cur = std::abs(sol.energy_integral(0.0, R));
    EXPECT_GT(cur, 50.0 * prev);
    prev = cur;
  }
}

TEST(Trace, CriticalCharacteristicIsInvariant) {
  const auto& sol = spherical();
  const double xw = sol.velocity().xi_w();
  const auto tr = sol.trace(TraceKind::CharacteristicMinus, -1.0, xw * -1.0, -0.25);
  EXPECT_NEAR(tr.nodes.back()[1], xw * -0.25, 1e-6);
}

TEST(Trace, ParticlesCrossCollapseWithLimitSpeedInOrder) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    double prev_r = 0.0;
    for (int i = 1; i <= 10; ++i) {
      const auto tr = sol->trace(TraceKind::Particle, -1.0, 0.1 * i, 0.5);
      ASSERT_TRUE(std::isfinite(tr.r_at_collapse));
      EXPECT_GT(tr.r_at_collapse, prev_r);
      EXPECT_NEAR(tr.speed_at_collapse, sol->velocity().u_star(), 1e-6);
      prev_r = tr.r_at_collapse;
      for (const auto& node : tr.nodes) ASSERT_GT(node[1], 0.0);
    }
  }
}

TEST(Trace, FastCharacteristicAboveCriticalCrossesCollapse) {
  const auto& sol = spherical();
  const auto tr = sol.trace(TraceKind::CharacteristicMinus, -1.0, 3.0, 0.1);
  ASSERT_TRUE(std::isfinite(tr.r_at_collapse));
  EXPECT_GT(tr.r_at_collapse, 0.0);
  EXPECT_NEAR(tr.speed_at_collapse, sol.velocity().u_star() - sol.params().a(), 1e-6);
}

TEST(Trace, CharacteristicBelowCriticalReachesOrigin) {
  const auto& sol = spherical();
  const auto tr = sol.trace(TraceKind::CharacteristicMinus, -1.0, 1.0, 0.5);
  EXPECT_EQ(tr.termination, TraceEnd::ReachedOrigin);
  EXPECT_NEAR(tr.terminal_slope, -sol.params().a(), 1e-3);
}

TEST(Trace, SpeedMatchesField) {
  const auto& sol = spherical();
  const double a = sol.params().a();
  const auto tr = sol.trace(TraceKind::CharacteristicPlus, -1.0, 0.5, -0.2);
  ASSERT_GT(tr.nodes.size(), 10u);
  // Classical RK4 on dr/dt = u + a between consecutive nodes.
  auto speed = [&](double t, double r) { return sol.u(t, r) + a; };
  for (std::size_t i = 0; i + 1 < tr.nodes.size(); ++i) {
    const double t0 = tr.nodes[i][0], t1 = tr.nodes[i + 1][0];
    const int n = 400;
    const double h = (t1 - t0) / n;
    double t = t0, r = tr.nodes[i][1];
    for (int k = 0; k < n; ++k) {
      const double k1 = speed(t, r), k2 = speed(t + h / 2, r + h / 2 * k1);
      const double k3 = speed(t + h / 2, r + h / 2 * k2), k4 = speed(t + h, r + h * k3);
      r += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      t += h;
    }
    EXPECT_NEAR(r, tr.nodes[i + 1][1], 1e-8) << "t=" << t0;
  }
}

TEST(Trace, RejectsBadInput) {
  EXPECT_THROW((void)spherical().trace(TraceKind::Particle, -1.0, 0.0, 1.0), Error);
  EXPECT_THROW((void)spherical().trace(TraceKind::Particle, 1.0, 1.0, -1.0), Error);
  EXPECT_EQ(trace_kind_from_string("particle"), TraceKind::Particle);
}
