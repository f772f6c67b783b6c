#pragma once

#include <vector>

#include "isofocus/flow_field.hpp"

namespace isofocus {

/// First-order finite-volume run of the radial system in the conserved
/// variables (r^m rho, r^m rho u) on [r_min, R].
struct FVConfig {
  double r_min = 0.1;
  double R = 3.0;
  int cells = 256;
  double cfl = 0.45;
  double t_start = -1.0;
  double t_end = 0.5;

  /// r_min = 0.05 |xi_w|, R = 3.
  static FVConfig defaults(const SimilaritySolution& sol, int cells);
};

void validate(const FVConfig& cfg);

struct FVState {
  double t = 0.0;
  double r_min = 0.0;
  double dr = 0.0;
  std::vector<double> q0;  ///< cell averages of r^m rho
  std::vector<double> q1;  ///< cell averages of r^m rho u
  long steps = 0;
  /// Time-integrated q0 flux entering through the two ends.
  double boundary_inflow = 0.0;
  /// max |d(sum q0 dr) - boundary inflow| relative to the total, per step.
  double conservation_defect = 0.0;

  std::size_t size() const { return q0.size(); }
  double center(std::size_t i) const { return r_min + (static_cast<double>(i) + 0.5) * dr; }
  double total_mass() const;
};

/// Exact cell averages by 3-point Gauss quadrature.
FVState init_from_similarity(const SimilaritySolution& sol, const FVConfig& cfg);
/// Exact cell averages of (r^m rho, r^m rho u) for the cell [lo, hi] at time t.
std::array<double, 2> exact_cell_average(const SimilaritySolution& sol, double t, double lo,
                                         double hi);

/// HLL fluxes, cell-centred source m a^2 r^(m-1) rho, exact ghost cells.
/// Throws PositivityLoss or CFLViolation.
FVState advance(FVState state, const FVConfig& cfg, const SimilaritySolution& sol);

struct FVError {
  double l1_q0 = 0.0;
  double l1_q1 = 0.0;
};

/// sum |cell average - exact cell average| dr, skipping cells within
/// `exclusion` of the shock.
FVError compare(const FVState& state, const SimilaritySolution& sol, double exclusion = 0.0);

struct FrontCapture {
  double r_exact = 0.0;
  double r_front = 0.0;
  double cells_off = 0.0;  ///< |r_front - r_exact| / dr
  double u_inner = 0.0;    ///< discrete u a few cells inside the front
  double u_outer = 0.0;
  double speed_minus_a = 0.0;  ///< r_front / t - a
  bool entropy_ok = false;     ///< u_inner > r_front / t - a > u_outer
};

/// Front from the equal-area condition: the q0 excess over the exact
/// profile in a window around the shock divided by the exact jump.
FrontCapture extract_front(const FVState& state, const SimilaritySolution& sol,
                           double window = 0.25);

struct FVRow {
  int cells = 0;
  FVError error;
  double rate_q0 = 0.0;  ///< log2 of the error ratio to the previous row
  double rate_q1 = 0.0;
  long steps = 0;
  double conservation_defect = 0.0;
  FrontCapture front;
};

struct FVConvergence {
  std::vector<FVRow> rows;
  double exclusion = 0.15;
  double min_rate = 0.8;
  double front_cells = 2.0;
  bool pass = false;
};

FVConvergence run_convergence(const SimilaritySolution& sol, const std::vector<int>& cells,
                              double exclusion = 0.15);

}  // namespace isofocus
