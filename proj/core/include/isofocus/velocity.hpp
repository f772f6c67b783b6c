#pragma once

#include <cstddef>
#include <limits>
#include <string_view>

#include "isofocus/branch.hpp"
#include "isofocus/params.hpp"

namespace isofocus {

/// Numerical settings shared by the profile constructions.
struct ConstructionOptions {
  double ode_rtol = 1e-10;
  double ode_atol = 1e-12;
  double root_tol = 1e-12;
  double quad_tol = 1e-11;
  /// Radius of the disc around P_w where node integrations start or stop,
  /// relative to |xi_w|.
  double node_eps_rel = 1e-7;
  /// Radius, relative to |xi_w|, around the 0/0 points (origin, ±P_w) inside
  /// which slopes come from the interpolant rather than the right-hand side.
  double node_exclusion_rel = 1e-2;
  /// The hat is integrated with ode_rtol, ode_atol scaled by this factor:
  /// near P_w the slope is ill-conditioned (dF/dU ~ 1/distance).
  double hat_tol_factor = 1e-2;
  /// Offset from the origin at which the hat branch is started, relative to |xi_w|.
  double origin_offset_rel = 1e-6;
  /// The tilde integration stops once U - xi + a exceeds -sonic_guard * a.
  double sonic_guard = 1e-6;
  /// xi_min = -xi_min_factor |xi_w|.
  double xi_min_factor = 1e3;
  /// xi_max = xi_max_factor |xi_w|.
  double xi_max_factor = 1e3;
  /// x0 = x0_rel * x_s for the D(x) = Omega(1/x) integration.
  double x0_rel = 1e-6;
  double omega0 = -1.0;
  std::size_t shock_scan_points = 10000;
  /// Relative step cap, in units of |xi_w|, for the finite parts of the branches.
  double h_max_rel = 0.05;
  /// Check the kink start by repeating it with half the node radius.
  bool node_sensitivity_check = true;
  /// Fault injection: Omega_+ is scaled by (1 + this) after the jump relation
  /// has been applied, so the stored jump data no longer satisfy it.
  double omega_plus_perturbation = 0.0;

  double ode_tol() const { return ode_rtol; }
};

/// Validates the options; throws InvalidParams.
void validate(const ConstructionOptions& opts);

/// Hat solution through (0, 0) with slope -beta/n, from P_w to -P_w.
/// Its log-amplitude integral L vanishes (to O(h0^2)) at the origin.
Branch build_hat(const SimilarityParams& params, const ConstructionOptions& opts = {});

struct KinkBuild {
  Branch branch;  ///< on [xi_min, xi_w], tail below xi_min; L(xi_w) = 0
  double u_star = 0.0;
  /// Richardson-based error estimate of u_star.
  double u_star_error = 0.0;
  double xi_min = 0.0;
  /// |U*(eps) - U*(eps/2)| from repeating the node departure; NaN if skipped.
  double node_sensitivity = std::numeric_limits<double>::quiet_NaN();
};

/// Kink solution leaving P_w along the fast eigendirection towards -infinity.
/// `xi_min` = 0 selects the default truncation.
KinkBuild build_kink(const SimilarityParams& params, const ConstructionOptions& opts = {},
                     double xi_min = 0.0);

struct TildeBuild {
  Branch branch;  ///< on [xi_stop, xi_max], tail above xi_max; L(xi_max) = 0
  double xi_star = 0.0;
  double xi_max = 0.0;
};

/// Outer solution descending from U* at +infinity; records where it meets l-.
/// `xi_max` = 0 selects the default truncation.
TildeBuild build_tilde(const SimilarityParams& params, double u_star,
                       const ConstructionOptions& opts = {}, double xi_max = 0.0);

/// Hugoniot locus H(xi) = xi + a^2 / (U_hat(xi) - xi), for 0 < xi <= -xi_w.
double hugoniot(double xi, const Branch& hat, const SimilarityParams& params);

enum class ShockFamily { OneShock, TwoShock, Inadmissible };
std::string_view to_string(ShockFamily f) noexcept;

struct ShockData {
  double xi_bar = 0.0;
  double U_minus = 0.0;
  double U_plus = 0.0;
  double Omega_minus = std::numeric_limits<double>::quiet_NaN();
  double Omega_plus = std::numeric_limits<double>::quiet_NaN();
  double V_minus = 0.0;
  double V_plus = 0.0;
  ShockFamily family = ShockFamily::Inadmissible;
  /// Number of sign changes of U_tilde - H found by the scan.
  std::size_t root_count = 0;
  /// U_- - (xi_bar - a) and (xi_bar - a) - U_+.
  double margin_inner = 0.0;
  double margin_outer = 0.0;
  /// |V_+ V_- - a^2| / a^2.
  double vv_residual = 0.0;
};

ShockFamily classify_shock(double xi_bar, double U_minus, double U_plus, double a);

/// Locates the reflected shock as the largest root of U_tilde - H on
/// (xi_star, -xi_w). Throws NoBracket or EntropyViolation.
ShockData find_shock(const Branch& hat, const TildeBuild& tilde, const SimilarityParams& params,
                     const ConstructionOptions& opts = {});

enum class VelocityPiece { Kink, Hat, Tilde };

class VelocityProfile {
 public:
  VelocityProfile() = default;
  VelocityProfile(SimilarityParams params, Branch hat, KinkBuild kink, TildeBuild tilde,
                  ShockData shock);

  const SimilarityParams& params() const { return *params_; }
  const Branch& hat() const { return hat_; }
  const Branch& kink() const { return kink_.branch; }
  const Branch& tilde() const { return tilde_.branch; }
  const KinkBuild& kink_build() const { return kink_; }
  const TildeBuild& tilde_build() const { return tilde_; }
  const ShockData& shock() const { return shock_; }
  ShockData& shock() { return shock_; }

  double u_star() const { return kink_.u_star; }
  double xi_s() const { return shock_.xi_bar; }
  double xi_star() const { return tilde_.xi_star; }
  double xi_w() const { return xi_w_; }
  /// U_tilde(xi_s) > 0: some fluid behind the reflected shock moves outward.
  bool stagnation() const { return shock_.U_plus > 0.0; }

  /// Piece containing xi; xi_s itself belongs to the hat (left limit).
  VelocityPiece piece(double xi) const;
  const Branch& branch(VelocityPiece p) const;
  double U(double xi) const;
  double dU(double xi) const;

  /// Largest midpoint residual over the parts of the branches that the
  /// profile actually uses.
  double max_residual() const;

 private:
  std::optional<SimilarityParams> params_;
  Branch hat_;
  KinkBuild kink_;
  TildeBuild tilde_;
  ShockData shock_;
  double xi_w_ = 0.0;
};

VelocityProfile assemble_velocity(const SimilarityParams& params, Branch hat, KinkBuild kink,
                                  TildeBuild tilde, ShockData shock);

/// Full velocity construction with the default truncations of `opts`.
VelocityProfile build_velocity_profile(const SimilarityParams& params,
                                       const ConstructionOptions& opts = {});

}  // namespace isofocus
