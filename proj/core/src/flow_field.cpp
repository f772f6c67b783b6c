#include "isofocus/flow_field.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "isofocus/error.hpp"

namespace isofocus {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

template <class F>
double gk(F&& f, double lo, double hi, double tol, const char* what) {
  // Boost's error estimate degrades on very short intervals; integrate on [0, 1].
  const double len = hi - lo;
  auto unit = [&](double x) { return f(lo + len * x) * len; };
  double err = 0.0;
  const double val = GK::integrate(unit, 0.0, 1.0, 20, tol, &err);
  if (!std::isfinite(val) || err > std::max(100.0 * tol * std::abs(val), 1e-300)) {
    std::ostringstream os;
    os << what << ": quadrature on [" << lo << ", " << hi << "] did not converge (value " << val
       << ", error " << err << ")";
    throw Error(ErrorKind::QuadratureFailure, os.str());
  }
  return val;
}

}  // namespace

SimilaritySolution::SimilaritySolution(std::shared_ptr<const VelocityProfile> velocity,
                                       DensityProfile density, ConstructionOptions opts)
    : velocity_(std::move(velocity)), density_(std::move(density)), opts_(opts) {
  shock_ = velocity_->shock();
  shock_.Omega_minus = density_.Omega_minus();
  shock_.Omega_plus = density_.Omega_plus();
}

SimilaritySolution SimilaritySolution::build(const SimilarityParams& params,
                                             const ConstructionOptions& opts) {
  auto v = std::make_shared<const VelocityProfile>(build_velocity_profile(params, opts));
  DensityProfile d = build_density_profile(v, opts);
  return SimilaritySolution(std::move(v), std::move(d), opts);
}

double SimilaritySolution::collapse_density(double r) const {
  return std::abs(density_.C_minus()) * std::pow(r, params().beta());
}

FieldValue SimilaritySolution::evaluate(double t, double r) const {
  if (t == 0.0 && r == 0.0) {
    throw Error(ErrorKind::OriginAtCollapse, "density is unbounded at (t, r) = (0, 0)");
  }
  if (!(r > 0.0) || !std::isfinite(r) || !std::isfinite(t)) {
    throw Error(ErrorKind::DomainError, "evaluate requires r > 0 and finite t");
  }
  const double xi = r / t;
  if (t == 0.0 || !std::isfinite(xi)) return {collapse_density(r), velocity_->u_star()};
  const double beta = params().beta();
  const double log_rho = beta * std::log(std::abs(t)) + density_.log_abs_Omega(xi);
  return {std::exp(log_rho), velocity_->U(xi)};
}

FieldValue SimilaritySolution::shock_side(double t, int side) const {
  if (!(t > 0.0)) throw Error(ErrorKind::DomainError, "the shock exists for t > 0 only");
  const double scale = std::pow(t, params().beta());
  return side < 0 ? FieldValue{scale * shock_.Omega_minus, shock_.U_minus}
                  : FieldValue{scale * shock_.Omega_plus, shock_.U_plus};
}

double SimilaritySolution::kink_radius(double t) const {
  return t < 0.0 ? velocity_->xi_w() * t : std::numeric_limits<double>::quiet_NaN();
}

double SimilaritySolution::shock_radius(double t) const {
  return t > 0.0 ? velocity_->xi_s() * t : std::numeric_limits<double>::quiet_NaN();
}

double SimilaritySolution::collapse_moment(double r_bar, int q) const {
  const double bn = params().beta() + params().n();
  return std::abs(density_.C_minus()) * std::pow(std::abs(velocity_->u_star()), q) *
         std::pow(r_bar, bn) / bn;
}

// In xi: M or I_q = |t|^(beta+n) int_0^S |Omega(sigma s)| |U(sigma s)|^q s^m ds,
// S = r_bar / |t|, split where the branches change and in log(s) beyond the first piece.
double SimilaritySolution::moment_xi(double t, double r_bar, int q) const {
  const double sigma = t < 0.0 ? -1.0 : 1.0;
  const double S = r_bar / std::abs(t);
  const int m = params().m();
  const auto& v = *velocity_;
  std::vector<double> cuts;
  if (sigma < 0.0) {
    cuts = {-v.xi_w(), -v.kink_build().xi_min};
  } else {
    cuts = {v.xi_s(), v.tilde_build().xi_max, 1.0 / density_.tilde().x0};
  }
  std::vector<double> pts{0.0};
  for (double c : cuts) {
    if (c < S) pts.push_back(c);
  }
  pts.push_back(S);

  auto integrand = [&](double s) {
    const double xi = sigma * s;
    const double om = std::abs(density_.Omega(xi));
    const double uq = q == 0 ? 1.0 : std::pow(std::abs(v.U(xi)), q);
    return om * uq * std::pow(s, m);
  };
  double total = 0.0;
  const double tol = opts_.quad_tol;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    if (!(b > a)) continue;
    if (i == 0) {
      total += gk([&](double s) { return s == 0.0 ? integrand(1e-300) : integrand(s); }, a, b, tol,
                  "moment integral");
    } else {
      total += gk([&](double w) {
                    const double s = std::exp(w);
                    return integrand(s) * s;
                  },
                  std::log(a), std::log(b), tol, "moment integral");
    }
  }
  return std::pow(std::abs(t), params().beta() + params().n()) * total;
}

double SimilaritySolution::mass_integral(double t, double r_bar) const {
  if (!(r_bar > 0.0)) throw Error(ErrorKind::DomainError, "r_bar must be positive");
  if (t == 0.0) return collapse_moment(r_bar, 0);
  return moment_xi(t, r_bar, 0);
}

double SimilaritySolution::moment_integral(double t, double r_bar, int q) const {
  if (!(r_bar > 0.0)) throw Error(ErrorKind::DomainError, "r_bar must be positive");
  if (q != 1 && q != 2) throw Error(ErrorKind::DomainError, "q must be 1 or 2");
  if (t == 0.0) return collapse_moment(r_bar, q);
  return moment_xi(t, r_bar, q);
}

double SimilaritySolution::energy_density(double t, double r) const {
  const FieldValue f = evaluate(t, r);
  const double a2 = params().a() * params().a();
  return (0.5 * f.rho * f.u * f.u + a2 * f.rho * std::log(f.rho)) * std::pow(r, params().m());
}

double SimilaritySolution::energy_integral(double t, double R) const {
  if (!(R > 0.0)) throw Error(ErrorKind::DomainError, "R must be positive");
  std::vector<double> pts;
  const double line = t < 0.0 ? kink_radius(t) : shock_radius(t);
  if (std::isfinite(line) && line < R) pts.push_back(line);
  pts.push_back(R);
  // Integrable r^(beta+m) log r behaviour at the origin: start far enough
  // down in log r that the omitted piece is below rounding.
  const double p = params().beta() + params().m() + 1.0;
  double lo = std::log(pts.front()) - 60.0 / p;
  double total = 0.0;
  for (double b : pts) {
    const double hi = std::log(b);
    total += gk([&](double w) {
                  const double r = std::exp(w);
                  return energy_density(t, r) * r;
                },
                lo, hi, opts_.quad_tol, "energy integral");
    lo = hi;
  }
  return total;
}

}  // namespace isofocus
