#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "isofocus/error.hpp"
#include "isofocus/fv.hpp"
#include "isofocus/weak_verifier.hpp"

namespace isofocus::io {

inline constexpr std::string_view kManifestSchema = "isofocus.manifest/1";
inline constexpr std::string_view kReportSchema = "isofocus.report/1";
inline constexpr std::string_view kErrorSchema = "isofocus.error/1";

std::string_view piece_name(VelocityPiece p) noexcept;
std::string_view piece_name(DensityPiece p) noexcept;

/// xi, U, dU, L at the integration nodes of one branch.
void write_branch_csv(std::ostream& os, const Branch& b);

/// xi, velocity piece, U, dU, density piece, Omega.
void write_profile_csv(std::ostream& os, const SimilaritySolution& sol,
                       const std::vector<double>& xi);

/// n points on [-3 |xi_w|, 3 xi_s], avoiding xi = 0.
std::vector<double> default_xi_grid(const SimilaritySolution& sol, int n);

/// t, r, rho, u.
void write_field_csv(std::ostream& os, const SimilaritySolution& sol, double t,
                     const std::vector<double>& r);

/// t, r along the path.
void write_trace_csv(std::ostream& os, const PathTrace& tr);
/// event, t, r, speed.
void write_trace_events_csv(std::ostream& os, const PathTrace& tr);

/// N, L1_q0, L1_q1, rate_q0, rate_q1, steps, front_cells_off.
void write_fv_convergence_csv(std::ostream& os, const FVConvergence& c);
/// r, q0, q1, q0_exact, q1_exact.
void write_fv_snapshot_csv(std::ostream& os, const FVState& s, const SimilaritySolution& sol);

struct Manifest {
  SimilarityParams params = SimilarityParams::make(2, -1.0);
  ConstructionOptions options;
  double xi_s = 0.0;
  double u_star = 0.0;
  double C_minus = 0.0;
  double Omega0_prime = 0.0;
  double Omega_plus = 0.0;
  double Omega_minus = 0.0;
};

/// Parameters, every construction option and the derived constants.
std::string manifest_json(const SimilaritySolution& sol);
Manifest parse_manifest(const std::string& text);
/// Rebuilds from the manifest and checks that the derived constants agree
/// bit for bit; throws IoError otherwise.
SimilaritySolution rebuild(const Manifest& m);

std::string report_json(const VerificationReport& rep);
std::string error_json(ErrorKind kind, std::string_view message, int exit_code);

}  // namespace isofocus::io
