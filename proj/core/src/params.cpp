#include "isofocus/params.hpp"

#include <cmath>
#include <sstream>

#include "isofocus/error.hpp"

namespace isofocus {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::SonicSingularity: return "SonicSingularity";
    case ErrorKind::OriginIndeterminate: return "OriginIndeterminate";
    case ErrorKind::CriticalPoint: return "CriticalPoint";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NodeNotReached: return "NodeNotReached";
    case ErrorKind::AssumptionViolated: return "AssumptionViolated";
    case ErrorKind::NoSonicCrossing: return "NoSonicCrossing";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::EntropyViolation: return "EntropyViolation";
    case ErrorKind::SignViolation: return "SignViolation";
    case ErrorKind::TailDivergence: return "TailDivergence";
    case ErrorKind::WeakJump: return "WeakJump";
    case ErrorKind::OriginAtCollapse: return "OriginAtCollapse";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::ClassViolation: return "ClassViolation";
    case ErrorKind::PositivityLoss: return "PositivityLoss";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::IntegrationFailure: return "IntegrationFailure";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

SimilarityParams SimilarityParams::make(int m, double beta, double a) {
  if (m != 1 && m != 2) {
    std::ostringstream os;
    os << "m must be 1 or 2 (got " << m << ")";
    throw Error(ErrorKind::InvalidParams, os.str());
  }
  if (!std::isfinite(beta) || !(beta > -m && beta < 0.0)) {
    std::ostringstream os;
    os << "β out of (−m,0): beta=" << beta << ", m=" << m
       << (beta <= -m ? " violates beta > -m" : " violates beta < 0");
    throw Error(ErrorKind::InvalidParams, os.str());
  }
  if (!std::isfinite(a) || !(a > 0.0)) {
    std::ostringstream os;
    os << "sound speed must be positive (got a=" << a << ")";
    throw Error(ErrorKind::InvalidParams, os.str());
  }
  // beta + m > 0 and beta + n > 0 follow from the bounds above; the flux and
  // mass estimates depend on them so they are checked explicitly.
  if (!(beta + m > 0.0) || !(beta + m + 1 > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "beta + m and beta + n must be positive");
  }
  return SimilarityParams(m, beta, a);
}

CriticalPointData critical_points(const SimilarityParams& params) {
  const double m = params.m();
  const double beta = params.beta();
  const double a = params.a();
  const double mu = params.mu();

  CriticalPointData cp{};
  cp.xi_w = -a * m / (m + beta);
  cp.U_w = a * beta / (m + beta);

  const double b = 1.0 + 0.5 * m * (1.0 + mu);
  cp.radicand = b * b - 2.0 * m * (1.0 + mu) * (1.0 + mu);
  if (!(cp.radicand > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "linearization radicand is not positive");
  }
  const double root = std::sqrt(cp.radicand);
  cp.lambda_plus = 0.5 * (b + root);
  // b - root loses digits when the eigenvalues are far apart; use the product.
  cp.lambda_minus = (m * (1.0 + mu) * (1.0 + mu) * 0.5) / cp.lambda_plus;
  cp.dir_plus = {1.0, 1.0 - cp.lambda_plus};
  cp.dir_minus = {1.0, 1.0 - cp.lambda_minus};
  return cp;
}

double ustar_bound(const SimilarityParams& params) {
  const auto cp = critical_points(params);
  const double a = params.a();
  const double m = params.m();
  // integral_{-inf}^{xi_w} dxi / (xi (xi - c)),  c = a + U_w
  //   = log1p(-c / xi_w) / c, with the c -> 0 limit 1/|xi_w|.
  const double c = a + cp.U_w;
  const double z = -c / cp.xi_w;
  double integral;
  if (std::abs(z) < 1e-8) {
    integral = (1.0 - 0.5 * z + z * z / 3.0) / std::abs(cp.xi_w);
  } else {
    integral = std::log1p(z) / c;
  }
  return cp.U_w + a * a * m * integral;
}

}  // namespace isofocus
