#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "isofocus/error.hpp"
#include "isofocus/weak_verifier.hpp"
#include "reference.hpp"

using namespace isofocus;
using isofocus::fixtures::cylindrical;
using isofocus::fixtures::rel_diff;
using isofocus::fixtures::spherical;

namespace {

// delta^m int_{-T}^{T} rho(t, delta) dt directly in t, split where r = delta meets a wave.
double mass_flux_by_t_quadrature(const SimilaritySolution& sol, double T, double delta) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> cuts{-T, 0.0, T};
  for (double tc : {delta / sol.velocity().xi_w(), delta / sol.velocity().xi_s()}) {
    if (std::abs(tc) < T) cuts.push_back(tc);
  }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], len = cuts[i + 1] - cuts[i];
    total += gauss_kronrod<double, 61>::integrate(
        [&](double x) {
          const double t = lo + len * x;
          return (t == 0.0 ? sol.collapse_density(delta) : sol.rho(t, delta)) * len;
        },
        0.0, 1.0, 20, 1e-14);
  }
  return std::pow(delta, sol.params().m()) * total;
}

TestFunction bump(std::string name, Plateau T, Plateau R) { return {std::move(name), T, R}; }

}  // namespace

TEST(Plateau, ShapeAndDerivative) {
  const Plateau p{1.0, 2.0, 3.0, 5.0};
  EXPECT_EQ(p.value(0.5), 0.0);
  EXPECT_EQ(p.value(2.5), 1.0);
  EXPECT_EQ(p.value(6.0), 0.0);
  EXPECT_NEAR(p.value(1.5), 0.5, 1e-15);
  for (double x : {1.2, 1.7, 3.5, 4.4}) {
    const double h = 1e-6;
    EXPECT_NEAR(p.derivative(x), (p.value(x + h) - p.value(x - h)) / (2 * h), 1e-7);
  }
  EXPECT_EQ(p.derivative(1.0), 0.0);
  EXPECT_EQ(p.derivative(5.0), 0.0);
  const Plateau flat{0.0, 0.0, 1.0, 2.0};
  EXPECT_EQ(flat.value(0.0), 1.0);
}

TEST(TestFunctions, BatteryCoversRequiredShapes) {
  const auto battery = default_battery(spherical());
  EXPECT_GE(battery.size(), 6u);
  std::set<std::string> names;
  bool has_c10_origin = false, has_c1c_origin = false;
  for (const auto& psi : battery) {
    names.insert(psi.name);
    if (psi.R.a <= 0.0) (psi.test_class() == TestClass::C10 ? has_c10_origin : has_c1c_origin) = true;
  }
  for (const char* n : {"interior", "shock-straddling", "kink-straddling", "collapse-covering", "large-support"}) {
    EXPECT_TRUE(names.count(n)) << n;
  }
  EXPECT_TRUE(has_c10_origin);
  EXPECT_TRUE(has_c1c_origin);
}

TEST(RankineHugoniot, ResidualSmallAndTimeInvariant) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto rh = check_rh(*sol, {0.01, 0.1, 0.5, 1.0, 4.0, 100.0});
    EXPECT_TRUE(rh.pass);
    EXPECT_LE(rh.max_residual, 1e-9);
    EXPECT_LE(rh.spread, 1e-12);
    ASSERT_EQ(rh.mass.size(), 6u);
  }
}

TEST(RankineHugoniot, PerturbationGivesLinearResponse) {
  ConstructionOptions o;
  o.omega_plus_perturbation = 0.01;
  const auto sol = SimilaritySolution::build(SimilarityParams::make(2, -1.0), o);
  const auto rh = check_rh(sol, {0.25, 1.0});
  EXPECT_FALSE(rh.pass);
  EXPECT_GT(rh.max_residual, 0.003);
  EXPECT_LT(rh.max_residual, 0.03);
  const auto rep = verify(sol, VerifyOptions{.run_weak = false});
  EXPECT_FALSE(rep.pass);
}

TEST(Entropy, MarginsAndProduct) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto e = check_entropy(*sol);
    EXPECT_TRUE(e.pass);
    EXPECT_GT(e.margin_inner, 0.0);
    EXPECT_GT(e.margin_outer, 0.0);
    EXPECT_LE(e.vv_residual, 1e-10);
  }
}

TEST(Extrapolation, RecoversSyntheticLimit) {
  for (double p : {1.7, 2.0, 2.5}) {
    std::vector<double> t, f;
    for (int k = 4; k <= 24; ++k) {
      const double tk = std::ldexp(1.0, -k);
      t.push_back(tk);
      const double g = p == 2.0 ? tk * tk * std::log(tk) : std::pow(tk, p);
      f.push_back(2.0 - 3.0 * tk + 5.0 * g + 0.5 * tk * tk);
    }
    const auto lim = extrapolate_to_zero(t, f, p);
    EXPECT_NEAR(lim.limit, 2.0, 1e-10) << p;
    EXPECT_LT(lim.error, 1e-8);
  }
}

TEST(Continuity, ConservedQuantitiesAcrossCollapse) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto c = check_continuity(*sol);
    EXPECT_TRUE(c.pass);
    ASSERT_EQ(c.quantities.size(), 3u);
    for (const auto& q : c.quantities) {
      EXPECT_LE(q.gap, q.error_bar) << q.name;
      EXPECT_LE(q.rel_closed, 1e-5) << q.name;
    }
  }
}

TEST(Flux, MassFluxMatchesDirectQuadrature) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    for (double delta : {0.5, 0.0625, 1.0 / 1024}) {
      EXPECT_LE(rel_diff(mass_flux_at(*sol, 1.0, delta), mass_flux_by_t_quadrature(*sol, 1.0, delta)), 1e-7)
          << delta;
    }
  }
}

TEST(Flux, DecaysWithPredictedSlope) {
  std::vector<double> deltas;
  for (int j = 1; j <= 12; ++j) deltas.push_back(std::ldexp(1.0, -j));
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto f = check_flux(*sol, 1.0, deltas);
    EXPECT_TRUE(f.decreasing);
    EXPECT_TRUE(f.pass) << f.fitted_slope << " vs " << f.predicted_slope;
    EXPECT_LE(std::abs(f.fitted_slope - f.predicted_slope), 0.1 * std::abs(f.predicted_slope));
    EXPECT_LT(f.mass_flux.back(), 1e-3 * f.mass_flux.front());
    EXPECT_LT(f.momentum_flux.back(), f.momentum_flux.front());
  }
}

TEST(WeakResidual, MomentumRequiresVanishingAtOrigin) {
  const auto psi = bump("origin", Plateau{-1.0, -0.5, 0.5, 1.0}, Plateau{0.0, 0.0, 0.5, 1.0});
  EXPECT_EQ(psi.test_class(), TestClass::C1c);
  try {
    (void)weak_residual(spherical(), psi, WeakForm::Momentum, 3);
    FAIL() << "expected ClassViolation";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ClassViolation);
  }
  EXPECT_NO_THROW((void)weak_residual(spherical(), psi, WeakForm::Mass, 3));
}

TEST(WeakResidual, SmoothRegionIsQuadratureExact) {
  const auto& sol = spherical();
  // t in [-1, -0.6], r in [0.2, 0.5]: inside the hat sector, away from every wave line.
  const auto psi = bump("smooth", Plateau{-1.0, -0.9, -0.7, -0.6}, Plateau{0.2, 0.3, 0.4, 0.5});
  for (auto form : {WeakForm::Mass, WeakForm::Momentum}) {
    const auto w = weak_residual(sol, psi, form, 3);
    EXPECT_LE(std::abs(w.residual), 1e-11 * w.scale);
    EXPECT_EQ(w.shock, 0.0);
  }
}

TEST(WeakResidual, DivergenceRoutesAgree) {
  const auto& sol = spherical();
  for (const auto& psi : default_battery(sol)) {
    for (auto form : {WeakForm::Mass, WeakForm::Momentum}) {
      if (form == WeakForm::Momentum && psi.test_class() != TestClass::C10) continue;
      const auto w = weak_residual(sol, psi, form, 5);
      EXPECT_LE(w.identity_gap, 1e-6 * w.scale) << psi.name;
    }
  }
}

TEST(WeakResidual, ShockStraddlingBoundedByJumpResidual) {
  ConstructionOptions o;
  o.omega_plus_perturbation = 1e-3;
  const auto bad = SimilaritySolution::build(SimilarityParams::make(2, -1.0), o);
  const auto battery = default_battery(bad);
  const auto it = std::find_if(battery.begin(), battery.end(),
                               [](const TestFunction& p) { return p.name == "shock-straddling"; });
  ASSERT_NE(it, battery.end());
  const auto w = weak_residual(bad, *it, WeakForm::Mass, 5);
  // A broken jump shows up in the residual only through the shock term.
  EXPECT_GT(std::abs(w.residual), 1e-6 * w.scale);
  EXPECT_NEAR(w.residual - w.strip, w.boundary + w.shock, 1e-8 * w.scale);
}

TEST(WeakBattery, AllFunctionsConverge) {
  for (const auto* sol : {&spherical(), &cylindrical()}) {
    const auto rh = check_rh(*sol, {0.5, 1.0});
    const auto b = check_weak_battery(*sol, default_battery(*sol), 3, 6, 1e-6, rh.max_residual);
    EXPECT_TRUE(b.pass);
    EXPECT_GE(b.entries.size(), 12u);
    for (const auto& e : b.entries) {
      EXPECT_TRUE(e.pass) << e.psi;
      EXPECT_TRUE(e.monotone) << e.psi;
      EXPECT_LE(e.final_relative, 1e-6) << e.psi;
      ASSERT_EQ(e.levels.size(), 4u);
    }
  }
}
