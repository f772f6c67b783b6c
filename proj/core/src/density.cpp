#include "isofocus/density.hpp"

#include <cmath>
#include <sstream>

#include "isofocus/error.hpp"

namespace isofocus {

namespace {

void require_sign(double v, int sign, const char* what) {
  if (!std::isfinite(v) || (sign > 0 ? !(v > 0.0) : !(v < 0.0))) {
    std::ostringstream os;
    os << what << " has the wrong sign or is not finite: " << v;
    throw Error(ErrorKind::SignViolation, os.str());
  }
}

}  // namespace

double log_omega_slope(const Branch& b, double xi) {
  const double a2 = b.params().a() * b.params().a();
  return -(b.U(xi) - xi) * b.dU(xi) / a2;
}

HatNegDensity build_hat_neg(const Branch& hat, double Omega0) {
  require_sign(Omega0, -1, "Omega0");
  const double xi_w = critical_points(hat.params()).xi_w;
  HatNegDensity d;
  d.Omega0 = Omega0;
  d.rep = {Omega0, hat.L(0.0)};
  d.Omega_w = d.rep.value(hat, xi_w);
  require_sign(d.Omega_w, -1, "Omega_hat(xi_w)");
  return d;
}

KinkDensity build_kink_Omega(const KinkBuild& kink, double Omega_w, const SimilarityParams& p,
                             double exponent_tol) {
  require_sign(Omega_w, -1, "Omega_w");
  const Branch& b = kink.branch;
  KinkDensity d;
  d.Omega_w = Omega_w;
  d.rep = {Omega_w, 0.0};
  d.xi_min = kink.xi_min;
  const auto ab = log_amplitude_tail(p, kink.u_star);
  d.A = ab[0];
  d.B = ab[1];

  // Last decade [xi_min, xi_min / 10] on a logarithmic grid.
  constexpr int kPts = 64;
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  double lx = 0, ly = 0, lxx = 0, lxy = 0;
  double env = 0.0;
  const double beta = p.beta();
  for (int i = 0; i < kPts; ++i) {
    const double xi = kink.xi_min * std::pow(10.0, -static_cast<double>(i) / (kPts - 1));
    const double dev = log_omega_slope(b, xi) - beta / xi;
    const double y = dev * xi * xi;
    const double z = 1.0 / xi;
    s11 += 1.0;
    s12 += z;
    s22 += z * z;
    r1 += y;
    r2 += y * z;
    const double u = std::log(std::abs(xi)), v = std::log(std::abs(dev));
    lx += u;
    ly += v;
    lxx += u * u;
    lxy += u * v;
    env = std::max(env, std::abs(y));
  }
  const double det = s11 * s22 - s12 * s12;
  d.A_fit = (r1 * s22 - r2 * s12) / det;
  d.B_fit = (s11 * r2 - s12 * r1) / det;
  d.tail_exponent = -(kPts * lxy - lx * ly) / (kPts * lxx - lx * lx);
  d.envelope = env;
  if (!(d.tail_exponent > 2.0 - exponent_tol)) {
    std::ostringstream os;
    os << "kink density tail decays like |xi|^-" << d.tail_exponent << ", slower than |xi|^-2";
    throw Error(ErrorKind::TailDivergence, os.str());
  }
  require_sign(d.rep.value(b, kink.xi_min), -1, "Omega_k(xi_min)");
  return d;
}

CMinus compute_C_minus(const KinkDensity& kd, const KinkBuild& kink, const SimilarityParams& p,
                       double ode_rtol) {
  const double xm = kd.xi_min;
  const double L = kink.branch.L(xm);
  // ln|Omega| = ln|C-| + beta ln|xi| + G(xi),  G = -A/xi - B/(2 xi^2)
  const double G = -kd.A_fit / xm - kd.B_fit / (2.0 * xm * xm);
  CMinus c;
  c.value = kd.Omega_w * std::exp(L - p.beta() * std::log(std::abs(xm)) - G);
  const double rel = std::abs(kd.A_fit - kd.A) / std::abs(xm) +
                     std::abs(kd.B_fit - kd.B) / (2.0 * xm * xm) +
                     std::abs(kd.B) / std::pow(std::abs(xm), 3) +
                     10.0 * ode_rtol * (1.0 + std::abs(L));
  c.error = rel * std::abs(c.value);
  c.envelope_bound = kd.envelope / std::abs(xm);
  require_sign(c.value, -1, "C-");
  return c;
}

double TildeDensity::regular_part(double x) const {
  if (x < x0) return -A * x - 0.5 * B * x * x;
  return E.value(x)[0];
}

double TildeDensity::log_value(double x) const {
  return std::log(C_plus) - beta * std::log(x) + regular_part(x);
}

double TildeDensity::value(double x) const {
  return C_plus * std::pow(x, -beta) * std::exp(regular_part(x));
}

double TildeDensity::derivative(double x, const Branch& tilde, const SimilarityParams&) const {
  const double xi = 1.0 / x;
  return -value(x) * log_omega_slope(tilde, xi) * xi * xi;
}

TildeDensity build_tilde_D(const TildeBuild& tilde, double u_star, double C_plus, double x_s,
                           const SimilarityParams& p, const ConstructionOptions& opts) {
  require_sign(C_plus, 1, "C+");
  TildeDensity d;
  d.C_plus = C_plus;
  d.x_s = x_s;
  d.x0 = opts.x0_rel * x_s;
  d.x_tail = 1.0 / tilde.xi_max;
  d.beta = p.beta();
  const auto ab = log_amplitude_tail(p, u_star);
  d.A = ab[0];
  d.B = ab[1];
  const double beta = p.beta();
  const Branch& b = tilde.branch;

  auto rhs = [&](double x, const ode::Vec<1>& /*e*/, ode::Vec<1>& de) {
    if (x < d.x_tail) {
      de[0] = -d.A - d.B * x;
      return true;
    }
    const double xi = 1.0 / x;
    const double F = log_omega_slope(b, xi);
    de[0] = -F * xi * xi + beta * xi;
    return true;
  };
  ode::Options o;
  o.rtol = opts.ode_rtol;
  o.atol = opts.ode_atol;
  const ode::Vec<1> e0{-d.A * d.x0 - 0.5 * d.B * d.x0 * d.x0};
  auto res = ode::integrate<1>(rhs, d.x0, e0, x_s, o);
  if (res.stop != ode::Stop::Reached) {
    throw Error(ErrorKind::IntegrationFailure, "D(x) integration did not reach x_s");
  }
  d.E = DenseCurve<1>(res.segments);
  require_sign(d.value(x_s), 1, "D(x_s)");
  return d;
}

double rh_density_jump(const ShockData& shock, double Omega_plus, double a) {
  const double v = shock.U_plus - shock.xi_bar;
  if (!(v * v > a * a)) {
    std::ostringstream os;
    os << "(U+ - xi_s)^2 = " << v * v << " does not exceed a^2";
    throw Error(ErrorKind::WeakJump, os.str());
  }
  return v * v / (a * a) * Omega_plus;
}

HatPosDensity build_hat_pos(const Branch& hat, double Omega_s_minus, double xi_s) {
  require_sign(Omega_s_minus, 1, "Omega(xi_s-)");
  HatPosDensity d;
  d.Omega_s_minus = Omega_s_minus;
  d.rep = {Omega_s_minus, hat.L(xi_s)};
  d.Omega0_prime = d.rep.value(hat, 0.0);
  require_sign(d.Omega0_prime, 1, "Omega0'");
  return d;
}

DensityProfile::DensityProfile(std::shared_ptr<const VelocityProfile> velocity,
                               HatNegDensity hat_neg, KinkDensity kink, CMinus c_minus,
                               TildeDensity tilde, HatPosDensity hat_pos)
    : velocity_(std::move(velocity)),
      hat_neg_(hat_neg),
      kink_(kink),
      c_minus_(c_minus),
      tilde_(std::move(tilde)),
      hat_pos_(hat_pos) {
  omega_plus_ = tilde_.value(tilde_.x_s);
}

DensityPiece DensityProfile::piece(double xi) const {
  if (xi == 0.0) {
    throw Error(ErrorKind::DomainError, "density amplitude is two-valued at xi = 0");
  }
  if (xi < 0.0) return xi <= velocity_->xi_w() ? DensityPiece::Kink : DensityPiece::HatNeg;
  return xi <= velocity_->xi_s() ? DensityPiece::HatPos : DensityPiece::Tilde;
}

double DensityProfile::log_abs_Omega(double xi) const {
  const auto& v = *velocity_;
  switch (piece(xi)) {
    case DensityPiece::Kink: {
      if (xi >= kink_.xi_min) return kink_.rep.log_abs(v.kink(), xi);
      const double G = -kink_.A_fit / xi - kink_.B_fit / (2.0 * xi * xi);
      return std::log(std::abs(c_minus_.value)) + v.params().beta() * std::log(-xi) + G;
    }
    case DensityPiece::HatNeg: return hat_neg_.rep.log_abs(v.hat(), xi);
    case DensityPiece::HatPos: return hat_pos_.rep.log_abs(v.hat(), xi);
    case DensityPiece::Tilde: return std::log(tilde_scale_) + tilde_.log_value(1.0 / xi);
  }
  return 0.0;
}

double DensityProfile::Omega(double xi) const {
  const auto& v = *velocity_;
  switch (piece(xi)) {
    case DensityPiece::Kink: {
      if (xi >= kink_.xi_min) return kink_.rep.value(v.kink(), xi);
      const double G = -kink_.A_fit / xi - kink_.B_fit / (2.0 * xi * xi);
      return c_minus_.value * std::pow(-xi, v.params().beta()) * std::exp(G);
    }
    case DensityPiece::HatNeg: return hat_neg_.rep.value(v.hat(), xi);
    case DensityPiece::HatPos: return hat_pos_.rep.value(v.hat(), xi);
    case DensityPiece::Tilde: return tilde_scale_ * tilde_.value(1.0 / xi);
  }
  return 0.0;
}

double DensityProfile::dOmega(double xi) const {
  const auto& v = *velocity_;
  const Branch& b = v.branch(v.piece(xi));
  return Omega(xi) * log_omega_slope(b, xi);
}

void DensityProfile::perturb_omega_plus(double relative) {
  tilde_scale_ = 1.0 + relative;
  omega_plus_ = tilde_scale_ * tilde_.value(tilde_.x_s);
}

DensityProfile assemble_density(std::shared_ptr<const VelocityProfile> velocity,
                                HatNegDensity hat_neg, KinkDensity kink, CMinus c_minus,
                                TildeDensity tilde, HatPosDensity hat_pos) {
  if (!(tilde.C_plus == -c_minus.value)) {
    throw Error(ErrorKind::InvalidParams, "matching requires C+ = -C-");
  }
  return DensityProfile(std::move(velocity), hat_neg, kink, c_minus, std::move(tilde), hat_pos);
}

DensityProfile build_density_profile(std::shared_ptr<const VelocityProfile> velocity,
                                     const ConstructionOptions& opts) {
  validate(opts);
  const VelocityProfile& v = *velocity;
  const SimilarityParams& p = v.params();
  HatNegDensity hn = build_hat_neg(v.hat(), opts.omega0);
  KinkDensity kd = build_kink_Omega(v.kink_build(), hn.Omega_w, p);
  CMinus cm = compute_C_minus(kd, v.kink_build(), p, opts.ode_rtol);
  const double x_s = 1.0 / v.xi_s();
  TildeDensity td = build_tilde_D(v.tilde_build(), v.u_star(), -cm.value, x_s, p, opts);
  const double omega_plus = td.value(x_s);
  const double omega_minus = rh_density_jump(v.shock(), omega_plus, p.a());
  HatPosDensity hp = build_hat_pos(v.hat(), omega_minus, v.xi_s());
  DensityProfile dp = assemble_density(std::move(velocity), hn, kd, cm, std::move(td), hp);
  if (opts.omega_plus_perturbation != 0.0) dp.perturb_omega_plus(opts.omega_plus_perturbation);
  return dp;
}

}  // namespace isofocus
