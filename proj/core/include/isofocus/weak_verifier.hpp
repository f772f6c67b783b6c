#pragma once

#include <array>
#include <string>
#include <vector>

#include "isofocus/flow_field.hpp"

namespace isofocus {

/// C^2 plateau profile built from the quintic smootherstep S(x) = 6x^5 - 15x^4 + 10x^3:
/// rises on [a, b], equals 1 on [b, c], falls on [c, d], vanishes outside.
/// With a == b the profile starts on its plateau (used at r = 0).
struct Plateau {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  double value(double x) const;
  double derivative(double x) const;
  std::array<double, 4> knots() const { return {a, b, c, d}; }
};

enum class TestClass {
  C1c,  ///< C^1 with compact support in [0, inf); may be non-zero at r = 0
  C10,  ///< additionally vanishes at r = 0 (admissible for the momentum form)
};

/// psi(t, r) = T(t) R(r).
struct TestFunction {
  std::string name;
  Plateau T;
  Plateau R;

  TestClass test_class() const { return R.value(0.0) == 0.0 ? TestClass::C10 : TestClass::C1c; }
  double value(double t, double r) const { return T.value(t) * R.value(r); }
  double dt(double t, double r) const { return T.derivative(t) * R.value(r); }
  double dr(double t, double r) const { return T.value(t) * R.derivative(r); }
};

/// Battery covering the interior, shock, kink, collapse, origin and a large
/// support, laid out relative to xi_w and xi_s of the solution.
std::vector<TestFunction> default_battery(const SimilaritySolution& sol);

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct RHCheck {
  std::vector<double> t;
  std::vector<double> mass;      ///< relative mass-jump residual per t
  std::vector<double> momentum;  ///< relative momentum-jump residual per t
  double max_residual = 0.0;
  /// max - min of the residuals over t (similarity invariance).
  double spread = 0.0;
  double tolerance = 1e-9;
  bool pass = false;
};

/// Rankine-Hugoniot residuals across r = xi_s t at each t > 0, relative to
/// the mass and momentum fluxes through the shock.
RHCheck check_rh(const SimilaritySolution& sol, const std::vector<double>& t_grid,
                 double tolerance = 1e-9);

struct EntropyCheck {
  double margin_inner = 0.0;  ///< U_- - (xi_s - a)
  double margin_outer = 0.0;  ///< (xi_s - a) - U_+
  double vv_residual = 0.0;   ///< |V+ V- - a^2| / a^2
  double vv_tolerance = 1e-10;
  bool pass = false;
};

EntropyCheck check_entropy(const SimilaritySolution& sol, double vv_tolerance = 1e-10);

struct OneSidedLimit {
  std::vector<double> t;
  std::vector<double> values;
  double limit = 0.0;
  double error = 0.0;  ///< extrapolation error estimate
};

struct ContinuityQuantity {
  std::string name;  ///< "M", "I1", "I2"
  OneSidedLimit below;
  OneSidedLimit above;
  double closed_form = 0.0;
  double gap = 0.0;        ///< |limit(0-) - limit(0+)|
  double error_bar = 0.0;  ///< combined extrapolation and C- error
  double rel_closed = 0.0; ///< max relative deviation of both limits from the closed form
  bool pass = false;
};

struct ContinuityCheck {
  double r_bar = 1.0;
  std::vector<ContinuityQuantity> quantities;
  double rel_tolerance = 1e-5;
  bool pass = false;
};

/// Extrapolates M, I_1, I_2 at t = ±2^-k (k = k_min..k_max) to t = 0 and
/// compares the one-sided limits with each other and with the closed forms.
ContinuityCheck check_continuity(const SimilaritySolution& sol, double r_bar = 1.0, int k_min = 2,
                                 int k_max = 24, double rel_tolerance = 1e-5);

/// Least-squares limit at t = 0 of samples f(t_k), using the basis
/// {1, |t|, |t|^p, t^2} (with |t|^2 log|t| replacing |t|^p when p = 2).
OneSidedLimit extrapolate_to_zero(const std::vector<double>& t, const std::vector<double>& f,
                                  double p);

struct FluxCheck {
  double T = 1.0;
  std::vector<double> delta;
  std::vector<double> mass_flux;      ///< delta^m int rho(t, delta) dt
  std::vector<double> momentum_flux;  ///< delta^m int (rho u^2 + p)(t, delta) dt
  double fitted_slope = 0.0;          ///< d log(flux) / d log(delta), last 4 points
  double predicted_slope = 0.0;       ///< same for the bound's delta dependence
  bool decreasing = false;
  double slope_tolerance = 0.1;       ///< relative
  bool pass = false;
};

/// delta^m int_{-T}^{T} rho(t, delta) dt, evaluated in xi.
double mass_flux_at(const SimilaritySolution& sol, double T, double delta);
double momentum_flux_at(const SimilaritySolution& sol, double T, double delta);

FluxCheck check_flux(const SimilaritySolution& sol, double T, const std::vector<double>& deltas,
                     double slope_tolerance = 0.1);

enum class WeakForm { Mass, Momentum };

struct WeakResidual {
  std::string psi;
  WeakForm form = WeakForm::Mass;
  int level = 0;
  double residual = 0.0;  ///< direct quadrature of the weak form over the support
  double scale = 0.0;     ///< same quadrature of the absolute values of the terms
  double delta = 0.0;
  double strip = 0.0;     ///< part of `residual` from r < delta
  double boundary = 0.0;  ///< -delta^m int (flux psi)(t, delta) dt
  double shock = 0.0;     ///< jump of the flux along r = xi_s t, weighted by psi
  /// |(residual - strip) - (boundary + shock)|: the divergence identity on r > delta.
  double identity_gap = 0.0;
};

/// Weak-form residual for one test function at one refinement level
/// (2^level graded sub-intervals per piece). Throws ClassViolation for the
/// momentum form when psi(t, 0) != 0.
WeakResidual weak_residual(const SimilaritySolution& sol, const TestFunction& psi, WeakForm form,
                           int level);

struct WeakBatteryEntry {
  std::string psi;
  WeakForm form = WeakForm::Mass;
  std::vector<WeakResidual> levels;
  bool monotone = false;
  double final_relative = 0.0;  ///< |residual| / scale at the finest level
  double tolerance = 1e-6;
  /// For the shock-straddling function: bound from the RH residual.
  double rh_bound = 0.0;
  bool pass = false;
};

struct WeakBatteryCheck {
  std::vector<WeakBatteryEntry> entries;
  int level_min = 3;
  int level_max = 6;
  double tolerance = 1e-6;
  /// Relative level (10 x ode_rtol) below which residuals count as converged
  /// when judging monotone decrease.
  double floor = 1e-9;
  bool pass = false;
};

WeakBatteryCheck check_weak_battery(const SimilaritySolution& sol,
                                    const std::vector<TestFunction>& battery, int level_min = 3,
                                    int level_max = 6, double tolerance = 1e-6,
                                    double rh_residual = 0.0);

struct VerificationReport {
  SimilarityParams params = SimilarityParams::make(2, -1.0);
  ConstructionOptions options;
  RHCheck rh;
  EntropyCheck entropy;
  ContinuityCheck continuity;
  FluxCheck flux;
  WeakBatteryCheck weak;
  std::vector<Check> checks;  ///< flat summary, one line per check
  bool pass = false;
};

struct VerifyOptions {
  std::vector<double> rh_times{0.125, 0.25, 0.5, 1.0, 2.0};
  double r_bar = 1.0;
  double flux_T = 1.0;
  int flux_j_max = 12;
  int weak_level_min = 3;
  int weak_level_max = 6;
  bool run_weak = true;
};

VerificationReport verify(const SimilaritySolution& sol, const VerifyOptions& vo = {});

}  // namespace isofocus
