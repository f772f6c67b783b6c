#pragma once

#include <span>
#include <vector>

#include "isofocus/params.hpp"

namespace isofocus {

/// A point (xi, U) of the similarity phase plane, xi = r / t.
struct PhasePoint {
  double xi;
  double U;
};

/// Raw right-hand side of the velocity ODE
///   U' = a^2 (beta + m U / xi) / ((U - xi)^2 - a^2)
/// with no singularity handling. Used inside integrators, which treat a
/// non-finite value as a rejected step.
inline double velocity_slope_raw(double xi, double U, const SimilarityParams& p) noexcept {
  const double a2 = p.a() * p.a();
  const double w = U - xi;
  return a2 * (p.beta() + p.m() * U / xi) / (w * w - a2);
}

/// d(ln|Omega|)/dxi given the local velocity slope.
inline double log_omega_slope_raw(double xi, double U, double dU,
                                  const SimilarityParams& p) noexcept {
  return -(U - xi) * dU / (p.a() * p.a());
}

struct SingularityTolerance {
  /// Relative band used for "on the line" decisions.
  double band = 1e-12;
};

/// Checked right-hand side of the velocity ODE.
///
/// At (0, 0) returns the limiting slope -beta/n of the unique solution
/// through the origin. Throws OriginIndeterminate for xi = 0 with U != 0,
/// SonicSingularity when the denominator vanishes with a non-zero numerator,
/// and CriticalPoint when both vanish (the points ±P_w).
double ode_rhs_U(PhasePoint p, const SimilarityParams& params,
                 SingularityTolerance tol = {});

/// Returns -(U - xi) * dU / a^2.
double ode_rhs_logOmega(PhasePoint p, double dU, const SimilarityParams& params);

/// Analytic second derivative U'' along a solution, away from singular lines.
double ode_second_derivative_U(PhasePoint p, const SimilarityParams& params);

/// Position of a phase point relative to the sonic lines l± = {U = xi ± a}
/// and the line ω = {beta + m U / xi = 0}. Signs are -1, 0 (inside the
/// tolerance band) or +1.
struct RegionInfo {
  int sign_lplus;   // sign of U - xi - a
  int sign_lminus;  // sign of U - xi + a
  int sign_omega;   // sign of beta + m U / xi
  bool on_lplus;
  bool on_lminus;
  bool on_omega;
  /// Membership in { xi < xi_w, U > -mu xi }.
  bool in_kink_region;
};

RegionInfo classify_region(PhasePoint p, const SimilarityParams& params,
                           SingularityTolerance tol = {});

/// Point reflection (xi, U) -> (-xi, -U); maps solutions to solutions.
std::vector<PhasePoint> mirror(std::span<const PhasePoint> samples);

}  // namespace isofocus
