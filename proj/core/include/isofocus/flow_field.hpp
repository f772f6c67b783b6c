#pragma once

#include <array>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "isofocus/density.hpp"
#include "isofocus/velocity.hpp"

namespace isofocus {

struct FieldValue {
  double rho;
  double u;
};

enum class TraceKind { CharacteristicPlus, CharacteristicMinus, Particle };
std::string_view to_string(TraceKind k) noexcept;
TraceKind trace_kind_from_string(std::string_view s);

enum class TraceEnd { ReachedTime, ReachedOrigin, AbsorbedByShock };
std::string_view to_string(TraceEnd e) noexcept;

struct PathEvent {
  std::string what;  ///< "collapse", "kink", "shock"
  double t;
  double r;
  double speed;  ///< dr/dt just after the event
};

struct PathTrace {
  TraceKind kind = TraceKind::Particle;
  std::vector<std::array<double, 2>> nodes;  ///< (t, r)
  std::vector<PathEvent> events;
  TraceEnd termination = TraceEnd::ReachedTime;
  double speed_at_collapse = std::numeric_limits<double>::quiet_NaN();
  double r_at_collapse = std::numeric_limits<double>::quiet_NaN();
  double terminal_slope = std::numeric_limits<double>::quiet_NaN();
};

/// Radial fields rho(t, r) = sgn(t) |t|^beta Omega(r/t), u = U(r/t), with the
/// collapse values rho(0, r) = |C-| r^beta, u(0, r) = U* at t = 0.
class SimilaritySolution {
 public:
  SimilaritySolution(std::shared_ptr<const VelocityProfile> velocity, DensityProfile density,
                     ConstructionOptions opts);

  static SimilaritySolution build(const SimilarityParams& params,
                                  const ConstructionOptions& opts = {});

  const SimilarityParams& params() const { return velocity_->params(); }
  const VelocityProfile& velocity() const { return *velocity_; }
  const DensityProfile& density() const { return density_; }
  const ConstructionOptions& options() const { return opts_; }
  /// Jump data with both amplitudes filled in.
  const ShockData& shock() const { return shock_; }

  FieldValue evaluate(double t, double r) const;
  double rho(double t, double r) const { return evaluate(t, r).rho; }
  double u(double t, double r) const { return evaluate(t, r).u; }
  /// u at r = xi_s t from the inner (side < 0) or outer (side > 0) limit.
  FieldValue shock_side(double t, int side) const;

  /// |C-| r^beta.
  double collapse_density(double r) const;

  /// M(t; r_bar) = int_0^r_bar rho r^m dr.
  double mass_integral(double t, double r_bar) const;
  /// I_q(t; r_bar) = int_0^r_bar rho |u|^q r^m dr.
  double moment_integral(double t, double r_bar, int q) const;
  /// Closed forms of M and I_q at t = 0 (q = 0 gives M).
  double collapse_moment(double r_bar, int q) const;

  /// E(t, r) = (rho u^2 / 2 + a^2 rho ln rho) r^m.
  double energy_density(double t, double r) const;
  /// int_0^R E(t, r) dr.
  double energy_integral(double t, double R) const;

  /// Integrates dr/dt = u (particle) or u ± a (characteristics) from (t0, r0) to t1.
  PathTrace trace(TraceKind kind, double t0, double r0, double t1) const;

  /// One-sided radii of the kink and shock lines at time t (NaN if absent).
  double kink_radius(double t) const;
  double shock_radius(double t) const;

 private:
  double moment_xi(double t, double r_bar, int q) const;

  std::shared_ptr<const VelocityProfile> velocity_;
  DensityProfile density_;
  ConstructionOptions opts_;
  ShockData shock_;
};

}  // namespace isofocus
