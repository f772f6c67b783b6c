#pragma once

#include <array>
#include <memory>

#include "isofocus/velocity.hpp"

namespace isofocus {

/// Density amplitude along a velocity branch, Omega(xi) = anchor * exp(L(xi) - L_anchor).
/// Linear in `anchor`, so rescaling the free amplitude rescales the branch exactly.
struct AnchoredDensity {
  double anchor = 0.0;
  double L_anchor = 0.0;

  double value(const Branch& b, double xi) const { return anchor * std::exp(b.L(xi) - L_anchor); }
  double log_abs(const Branch& b, double xi) const {
    return std::log(std::abs(anchor)) + (b.L(xi) - L_anchor);
  }
};

/// d ln|Omega| / dxi along a velocity branch.
double log_omega_slope(const Branch& b, double xi);

struct HatNegDensity {
  AnchoredDensity rep;  ///< anchored at Omega(0-) = Omega0
  double Omega0 = 0.0;
  double Omega_w = 0.0;
};

/// Negative-side hat amplitude from Omega(0-) = Omega0 < 0 back to xi_w. Throws SignViolation.
HatNegDensity build_hat_neg(const Branch& hat, double Omega0);

struct KinkDensity {
  AnchoredDensity rep;  ///< anchored at Omega_k(xi_w) = Omega_w
  double Omega_w = 0.0;
  double xi_min = 0.0;
  /// Least-squares fit of xi^2 (F - beta/xi) = A + B/xi over the last decade.
  double A_fit = 0.0;
  double B_fit = 0.0;
  /// Analytic values of the same coefficients.
  double A = 0.0;
  double B = 0.0;
  /// Fitted decay exponent p of |F - beta/xi| ~ |xi|^-p.
  double tail_exponent = 0.0;
  /// max |xi|^2 |F - beta/xi| over the last decade.
  double envelope = 0.0;
};

/// Kink amplitude from Omega_w down to xi_min, with the tail characterised
/// empirically. Throws TailDivergence if the tail decays slower than xi^-2.
KinkDensity build_kink_Omega(const KinkBuild& kink, double Omega_w, const SimilarityParams& params,
                             double exponent_tol = 0.1);

struct CMinus {
  double value = 0.0;
  /// Estimated error of `value` after the tail correction.
  double error = 0.0;
  /// Envelope bound on the whole truncated tail integral (relative to |C-|).
  double envelope_bound = 0.0;
};

/// C- = lim |xi|^-beta Omega_k(xi) as xi -> -inf.
CMinus compute_C_minus(const KinkDensity& kd, const KinkBuild& kink, const SimilarityParams& params,
                       double ode_rtol = 1e-10);

/// D(x) = Omega_tilde(1/x) on (0, x_s], D(x) = C+ x^-beta exp(E(x)) with
/// E(x) -> 0 as x -> 0.
struct TildeDensity {
  double C_plus = 0.0;
  double x0 = 0.0;
  double x_s = 0.0;
  double x_tail = 0.0;  ///< 1 / xi_max: below this the series of E' is used
  double A = 0.0;
  double B = 0.0;
  double beta = 0.0;
  DenseCurve<1> E;

  double regular_part(double x) const;  ///< E(x)
  double value(double x) const;
  double log_value(double x) const;
  /// dD/dx.
  double derivative(double x, const Branch& tilde, const SimilarityParams& p) const;
};

TildeDensity build_tilde_D(const TildeBuild& tilde, double u_star, double C_plus, double x_s,
                           const SimilarityParams& params, const ConstructionOptions& opts = {});

/// Omega_- = ((U_+ - xi_s)^2 / a^2) Omega_+. Throws WeakJump if (U_+ - xi_s)^2 <= a^2.
double rh_density_jump(const ShockData& shock, double Omega_plus, double a);

struct HatPosDensity {
  AnchoredDensity rep;  ///< anchored at Omega(xi_s-) = Omega_-
  double Omega_s_minus = 0.0;
  double Omega0_prime = 0.0;
};

HatPosDensity build_hat_pos(const Branch& hat, double Omega_s_minus, double xi_s);

enum class DensityPiece { Kink, HatNeg, HatPos, Tilde };

class DensityProfile {
 public:
  DensityProfile() = default;
  DensityProfile(std::shared_ptr<const VelocityProfile> velocity, HatNegDensity hat_neg,
                 KinkDensity kink, CMinus c_minus, TildeDensity tilde, HatPosDensity hat_pos);

  const VelocityProfile& velocity() const { return *velocity_; }
  std::shared_ptr<const VelocityProfile> velocity_ptr() const { return velocity_; }

  double Omega0() const { return hat_neg_.Omega0; }
  double Omega_w() const { return hat_neg_.Omega_w; }
  double C_minus() const { return c_minus_.value; }
  double C_minus_error() const { return c_minus_.error; }
  const CMinus& c_minus() const { return c_minus_; }
  double C_plus() const { return tilde_.C_plus; }
  double Omega0_prime() const { return hat_pos_.Omega0_prime; }
  double x_s() const { return tilde_.x_s; }
  double Omega_plus() const { return omega_plus_; }
  double Omega_minus() const { return hat_pos_.Omega_s_minus; }

  const HatNegDensity& hat_neg() const { return hat_neg_; }
  const KinkDensity& kink() const { return kink_; }
  const TildeDensity& tilde() const { return tilde_; }
  const HatPosDensity& hat_pos() const { return hat_pos_; }

  /// Piece containing xi (xi != 0). xi_s belongs to the hat.
  DensityPiece piece(double xi) const;
  double Omega(double xi) const;
  double log_abs_Omega(double xi) const;
  double dOmega(double xi) const;

  /// Overrides the stored outer amplitude (fault injection); the evaluator
  /// for xi > xi_s is rescaled accordingly.
  void perturb_omega_plus(double relative);

 private:
  friend DensityProfile assemble_density(std::shared_ptr<const VelocityProfile>, HatNegDensity,
                                         KinkDensity, CMinus, TildeDensity, HatPosDensity);

  std::shared_ptr<const VelocityProfile> velocity_;
  HatNegDensity hat_neg_;
  KinkDensity kink_;
  CMinus c_minus_;
  TildeDensity tilde_;
  HatPosDensity hat_pos_;
  double omega_plus_ = 0.0;
  double tilde_scale_ = 1.0;
};

DensityProfile assemble_density(std::shared_ptr<const VelocityProfile> velocity,
                                HatNegDensity hat_neg, KinkDensity kink, CMinus c_minus,
                                TildeDensity tilde, HatPosDensity hat_pos);

/// Full density construction on top of a velocity profile.
DensityProfile build_density_profile(std::shared_ptr<const VelocityProfile> velocity,
                                     const ConstructionOptions& opts = {});

}  // namespace isofocus
