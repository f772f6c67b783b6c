#include "isofocus/similarity_ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isofocus/error.hpp"

namespace isofocus {

namespace {

int banded_sign(double value, double scale, double band) {
  if (std::abs(value) <= band * std::max(1.0, scale)) return 0;
  return value > 0.0 ? 1 : -1;
}

}  // namespace

double ode_rhs_U(PhasePoint p, const SimilarityParams& params, SingularityTolerance tol) {
  const double a = params.a();
  const double a2 = a * a;
  const double scale = std::max({std::abs(p.xi), std::abs(p.U), a});
  if (std::abs(p.xi) <= tol.band * scale) {
    if (std::abs(p.U) <= tol.band * scale) return -params.beta() / params.n();
    std::ostringstream os;
    os << "similarity ODE undefined at xi=0 with U=" << p.U;
    throw Error(ErrorKind::OriginIndeterminate, os.str());
  }
  const double w = p.U - p.xi;
  // Numerator written as (beta xi + m U) / xi so both factors carry a scale.
  const double num_scaled = params.beta() * p.xi + params.m() * p.U;
  const double den = w * w - a2;
  const bool num_zero = std::abs(num_scaled) <= tol.band * scale * params.m();
  const bool den_zero = std::abs(den) <= tol.band * std::max(w * w, a2);
  if (den_zero) {
    std::ostringstream os;
    os << "(xi,U)=(" << p.xi << "," << p.U << ")";
    if (num_zero) {
      throw Error(ErrorKind::CriticalPoint, "critical point of the similarity ODE at " + os.str());
    }
    throw Error(ErrorKind::SonicSingularity, "sonic line crossed at " + os.str());
  }
  return a2 * (num_scaled / p.xi) / den;
}

double ode_rhs_logOmega(PhasePoint p, double dU, const SimilarityParams& params) {
  return log_omega_slope_raw(p.xi, p.U, dU, params);
}

double ode_second_derivative_U(PhasePoint p, const SimilarityParams& params) {
  const double a2 = params.a() * params.a();
  const double m = params.m();
  const double dU = ode_rhs_U(p, params);
  if (p.xi == 0.0) return 0.0;  // odd solution through the origin
  const double w = p.U - p.xi;
  const double den = w * w - a2;
  // N = beta + m U / xi,  N' = m (xi U' - U) / xi^2,  D' = 2 w (U' - 1)
  const double dN = m * (p.xi * dU - p.U) / (p.xi * p.xi);
  const double dD = 2.0 * w * (dU - 1.0);
  return (a2 * dN - dU * dD) / den;
}

RegionInfo classify_region(PhasePoint p, const SimilarityParams& params, SingularityTolerance tol) {
  if (p.xi == 0.0) {
    throw Error(ErrorKind::DomainError, "classify_region requires xi != 0");
  }
  const double a = params.a();
  const double scale = std::max({std::abs(p.xi), std::abs(p.U), a});
  RegionInfo info{};
  info.sign_lplus = banded_sign(p.U - p.xi - a, scale, tol.band);
  info.sign_lminus = banded_sign(p.U - p.xi + a, scale, tol.band);
  // sign(beta + m U / xi) = sign(beta xi + m U) * sign(xi)
  const int s = banded_sign(params.beta() * p.xi + params.m() * p.U, scale * params.m(), tol.band);
  info.sign_omega = p.xi > 0.0 ? s : -s;
  info.on_lplus = info.sign_lplus == 0;
  info.on_lminus = info.sign_lminus == 0;
  info.on_omega = info.sign_omega == 0;
  const auto cp = critical_points(params);
  info.in_kink_region = p.xi < cp.xi_w && p.U > -params.mu() * p.xi &&
                        banded_sign(p.U + params.mu() * p.xi, scale, tol.band) > 0;
  return info;
}

std::vector<PhasePoint> mirror(std::span<const PhasePoint> samples) {
  std::vector<PhasePoint> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back({-s.xi, -s.U});
  return out;
}

}  // namespace isofocus
