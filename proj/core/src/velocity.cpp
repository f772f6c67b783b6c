#include "isofocus/velocity.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>

#include "isofocus/error.hpp"
#include "isofocus/similarity_ode.hpp"

namespace isofocus {

namespace {

using V2 = ode::Vec<2>;

ode::Options ode_options(const ConstructionOptions& opts, double h_max) {
  ode::Options o;
  o.rtol = opts.ode_rtol;
  o.atol = opts.ode_atol;
  o.h_max = h_max;
  return o;
}

bool state_rhs(double x, const V2& y, V2& dy, const SimilarityParams& p) {
  const double dU = velocity_slope_raw(x, y[0], p);
  dy = {dU, log_omega_slope_raw(x, y[0], dU, p)};
  return true;
}

// (U'', L'') along a solution from the analytic differentiation of the ODE.
V2 second_derivative(double x, const V2& y, const V2& dy, const SimilarityParams& p) {
  const double a2 = p.a() * p.a();
  const double u = y[0], du = dy[0];
  const double w = u - x;
  const double dN = p.m() * (x * du - u) / (x * x);
  const double dD = 2.0 * w * (du - 1.0);
  const double d2u = (a2 * dN - du * dD) / (w * w - a2);
  return {d2u, -((du - 1.0) * du + w * d2u) / a2};
}

// Replaces the DOPRI5 continuous extension by quintic Hermite pieces built
// from the nodal values, slopes and analytic second derivatives. Pieces
// touching an exclusion disc keep the integrator's interpolant.
std::vector<ode::DenseSegment<2>> quintic_pieces(const ode::Result<2>& res,
                                                 const SimilarityParams& p,
                                                 std::initializer_list<double> centers,
                                                 double radius) {
  std::vector<ode::DenseSegment<2>> out;
  out.reserve(res.segments.size());
  for (std::size_t i = 0; i < res.segments.size(); ++i) {
    const double xa = res.x[i], xb = res.x[i + 1];
    bool near = false;
    for (double c : centers) {
      if (std::abs(xa - c) <= radius || std::abs(xb - c) <= radius) near = true;
    }
    const V2 sa = second_derivative(xa, res.y[i], res.dy[i], p);
    const V2 sb = second_derivative(xb, res.y[i + 1], res.dy[i + 1], p);
    bool finite = std::isfinite(sa[0]) && std::isfinite(sa[1]) && std::isfinite(sb[0]) &&
                  std::isfinite(sb[1]);
    if (near || !finite) {
      out.push_back(res.segments[i]);
    } else {
      out.push_back(ode::quintic_hermite_segment<2>(xa, res.y[i], res.dy[i], sa, xb,
                                                    res.y[i + 1], res.dy[i + 1], sb));
    }
  }
  return out;
}

std::string fmt_point(double x, double u) {
  std::ostringstream os;
  os << "(" << x << ", " << u << ")";
  return os.str();
}

// U* consistent with U(xi) under the three-term tail model (fixed point).
double ustar_from_tail(const SimilarityParams& p, double xi, double U) {
  double s = U;
  for (int it = 0; it < 12; ++it) {
    const VelocityTail t = velocity_tail(p, s, xi, true);
    const double z = 1.0 / xi;
    s = U - z * (t.c[0] + z * (t.c[1] + z * t.c[2]));
  }
  return s;
}

struct KinkRun {
  ode::Result<2> res;
  ode::DenseSegment<2> closure;
  double u_star;
  double u_star_error;
};

KinkRun run_kink(const SimilarityParams& p, const ConstructionOptions& opts, double xi_min,
                 double eps) {
  const auto cp = critical_points(p);
  const double a2 = p.a() * p.a();
  const double mu = p.mu();
  const double norm = std::hypot(cp.dir_plus[0], cp.dir_plus[1]);
  const double dx = cp.dir_plus[0] / norm, du = cp.dir_plus[1] / norm;
  const double xs = cp.xi_w - eps * dx;
  const double us = cp.U_w - eps * du;
  const double slope = 1.0 - cp.lambda_plus;
  const double fk = -(cp.U_w - cp.xi_w) * slope / a2;
  const V2 y0{us, fk * (xs - cp.xi_w)};

  auto rhs = [&](double x, const V2& y, V2& dy) {
    if (!(y[0] > -mu * x && y[0] > cp.U_w)) return false;
    return state_rhs(x, y, dy, p);
  };
  KinkRun run;
  run.res = ode::integrate<2>(rhs, xs, y0, xi_min,
                              ode_options(opts, std::numeric_limits<double>::infinity()));
  if (run.res.stop != ode::Stop::Reached) {
    throw Error(ErrorKind::IntegrationFailure,
                "kink integration stopped at xi=" + std::to_string(run.res.x_last()) +
                    " before reaching xi_min=" + std::to_string(xi_min));
  }
  run.closure = ode::hermite_segment<2>(cp.xi_w, V2{cp.U_w, 0.0}, V2{slope, fk}, xs, y0,
                                        run.res.dy.front());

  DenseCurve<2> curve(run.res.segments);
  const double u1 = ustar_from_tail(p, xi_min, curve.value(xi_min)[0]);
  const double u2 = ustar_from_tail(p, 0.5 * xi_min, curve.value(0.5 * xi_min)[0]);
  run.u_star = u1 + (u1 - u2) / 15.0;
  run.u_star_error = std::abs(u1 - u2) / 15.0 + 10.0 * opts.ode_rtol * std::abs(u1);
  return run;
}

}  // namespace

void validate(const ConstructionOptions& o) {
  auto pos = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidParams, std::string(name) + " must be positive");
    }
  };
  pos(o.ode_rtol, "ode_rtol");
  pos(o.ode_atol, "ode_atol");
  pos(o.root_tol, "root_tol");
  pos(o.quad_tol, "quad_tol");
  pos(o.node_eps_rel, "node_eps_rel");
  pos(o.origin_offset_rel, "origin_offset_rel");
  pos(o.sonic_guard, "sonic_guard");
  pos(o.xi_min_factor, "xi_min_factor");
  pos(o.xi_max_factor, "xi_max_factor");
  pos(o.x0_rel, "x0_rel");
  pos(o.h_max_rel, "h_max_rel");
  pos(o.node_exclusion_rel, "node_exclusion_rel");
  pos(o.hat_tol_factor, "hat_tol_factor");
  if (o.xi_min_factor <= 10.0 || o.xi_max_factor <= 10.0) {
    throw Error(ErrorKind::InvalidParams, "truncation factors must exceed 10");
  }
  if (!(o.omega0 < 0.0) || !std::isfinite(o.omega0)) {
    throw Error(ErrorKind::InvalidParams, "omega0 must be negative");
  }
  if (o.shock_scan_points < 16) {
    throw Error(ErrorKind::InvalidParams, "shock_scan_points must be at least 16");
  }
  if (!std::isfinite(o.omega_plus_perturbation) || o.omega_plus_perturbation <= -1.0) {
    throw Error(ErrorKind::InvalidParams, "omega_plus_perturbation must exceed -1");
  }
}

Branch build_hat(const SimilarityParams& p, const ConstructionOptions& opts) {
  validate(opts);
  const auto cp = critical_points(p);
  const double a2 = p.a() * p.a();
  const double mu = p.mu();
  const double s = -p.beta() / p.n();
  const double scale = std::abs(cp.xi_w);
  const double h0 = opts.origin_offset_rel * scale;
  const double eps = opts.node_eps_rel * scale;
  const double slow = 1.0 - cp.lambda_minus;
  const double excl = opts.node_exclusion_rel * scale;

  std::vector<ode::DenseSegment<2>> segs;
  std::vector<BranchSample> samples;
  V2 start_state[2]{};
  V2 start_slope[2]{};

  for (int k = 0; k < 2; ++k) {
    const double side = k == 0 ? -1.0 : 1.0;
    const double tx = -side * cp.xi_w;  // P_w on the left, -P_w on the right
    const double tu = -side * cp.U_w;
    const double x0 = side * h0;
    const V2 y0{s * x0, -(s - 1.0) * s * x0 * x0 / (2.0 * a2)};

    auto rhs = [&](double x, const V2& y, V2& dy) {
      const double u = y[0];
      const bool inside = side < 0.0 ? (u < x + p.a() && u > -mu * x)
                                     : (u > x - p.a() && u < -mu * x);
      if (!inside) return false;
      return state_rhs(x, y, dy, p);
    };
    auto event = [&](double x, const V2& y) {
      const double ddx = x - tx, ddu = y[0] - tu;
      return ddx * ddx + ddu * ddu - eps * eps;
    };
    ode::Options o = ode_options(opts, opts.h_max_rel * scale);
    o.rtol *= opts.hat_tol_factor;
    o.atol *= opts.hat_tol_factor;
    auto res = ode::integrate<2>(rhs, x0, y0, tx + side * eps, o, event);
    if (res.stop != ode::Stop::Event) {
      throw Error(ErrorKind::NodeNotReached,
                  "hat integration left the wedge between omega and the sonic line at " +
                      fmt_point(res.x_last(), res.y_last()[0]));
    }
    const double xe = res.x_last();
    const V2 ye = res.y_last();
    const V2 fe = res.dy.back();
    const double ft = -(tu - tx) * slow / a2;
    const double lt = ye[1] + 0.5 * (tx - xe) * (fe[1] + ft);
    segs.push_back(ode::hermite_segment<2>(xe, ye, fe, tx, V2{tu, lt}, V2{slow, ft}));
    const auto pieces = quintic_pieces(res, p, {0.0, tx}, excl);
    segs.insert(segs.end(), pieces.begin(), pieces.end());
    auto part = samples_from(res);
    samples.insert(samples.end(), part.begin(), part.end());
    samples.push_back({tx, tu, slow, lt});
    start_state[k] = y0;
    start_slope[k] = res.dy.front();
  }
  segs.push_back(ode::hermite_segment<2>(-h0, start_state[0], start_slope[0], h0, start_state[1],
                                         start_slope[1]));
  samples.push_back({0.0, 0.0, s, segs.back().value(0.0)[1]});

  Branch b("hat", p, DenseCurve<2>(std::move(segs)), std::move(samples));
  b.add_special_point(0.0, excl);
  b.add_special_point(cp.xi_w, excl);
  b.add_special_point(-cp.xi_w, excl);
  return b;
}

KinkBuild build_kink(const SimilarityParams& p, const ConstructionOptions& opts, double xi_min) {
  validate(opts);
  const auto cp = critical_points(p);
  const double scale = std::abs(cp.xi_w);
  if (xi_min == 0.0) xi_min = -opts.xi_min_factor * scale;
  if (!(xi_min < cp.xi_w - 10.0 * scale)) {
    throw Error(ErrorKind::InvalidParams, "xi_min must lie well below xi_w");
  }
  const double eps = opts.node_eps_rel * scale;
  KinkRun run = run_kink(p, opts, xi_min, eps);

  KinkBuild out;
  out.xi_min = xi_min;
  out.u_star = run.u_star;
  out.u_star_error = run.u_star_error;
  if (opts.node_sensitivity_check) {
    out.node_sensitivity = std::abs(run_kink(p, opts, xi_min, 0.5 * eps).u_star - run.u_star);
  }
  if (!(out.u_star < 0.0)) {
    throw Error(ErrorKind::AssumptionViolated,
                "U* = " + std::to_string(out.u_star) + " is not negative");
  }

  const double excl = opts.node_exclusion_rel * scale;
  std::vector<ode::DenseSegment<2>> segs = quintic_pieces(run.res, p, {cp.xi_w}, excl);
  segs.push_back(run.closure);
  auto samples = samples_from(run.res);
  samples.push_back({cp.xi_w, cp.U_w, 1.0 - cp.lambda_plus, 0.0});
  out.branch = Branch("kink", p, DenseCurve<2>(std::move(segs)), std::move(samples),
                      velocity_tail(p, out.u_star, xi_min, true));
  out.branch.add_special_point(cp.xi_w, excl);
  return out;
}

TildeBuild build_tilde(const SimilarityParams& p, double u_star, const ConstructionOptions& opts,
                       double xi_max) {
  validate(opts);
  if (!(u_star < 0.0)) {
    throw Error(ErrorKind::InvalidParams, "build_tilde requires U* < 0");
  }
  const auto cp = critical_points(p);
  const double a = p.a();
  const double a2 = a * a;
  const double scale = std::abs(cp.xi_w);
  if (xi_max == 0.0) xi_max = opts.xi_max_factor * scale;
  if (!(xi_max > 10.0 * scale)) {
    throw Error(ErrorKind::InvalidParams, "xi_max must lie well above -xi_w");
  }
  const VelocityTail tail = velocity_tail(p, u_star, xi_max, false);
  const V2 y0{tail.value(xi_max), 0.0};

  auto rhs = [&](double x, const V2& y, V2& dy) {
    if (!(y[0] - x + a < 0.0)) return false;
    return state_rhs(x, y, dy, p);
  };
  auto event = [&](double x, const V2& y) { return y[0] - x + a + opts.sonic_guard * a; };
  auto res = ode::integrate<2>(rhs, xi_max, y0, 0.0,
                               ode_options(opts, std::numeric_limits<double>::infinity()), event);
  if (res.stop != ode::Stop::Event) {
    throw Error(ErrorKind::NoSonicCrossing,
                "outer branch did not approach l- (stopped at xi=" + std::to_string(res.x_last()) +
                    ")");
  }

  // Cross l- in the autonomous form (xi, U)' = (-D, -a^2 N), regular there.
  auto auto_rhs = [&](double, const V2& z, V2& dz) {
    const double w = z[1] - z[0];
    dz = {-(w * w - a2), -a2 * (p.beta() + p.m() * z[1] / z[0])};
    return true;
  };
  auto cross = [&](double, const V2& z) { return z[1] - z[0] + a; };
  ode::Options ao = ode_options(opts, std::numeric_limits<double>::infinity());
  ao.h_init = 1e-3 * opts.sonic_guard;
  auto sres = ode::integrate<2>(auto_rhs, 0.0, V2{res.x_last(), res.y_last()[0]}, 1.0, ao, cross);
  if (sres.stop != ode::Stop::Event) {
    throw Error(ErrorKind::NoSonicCrossing, "outer branch does not cross l-");
  }
  TildeBuild out;
  out.xi_max = xi_max;
  out.xi_star = sres.y_last()[0];
  if (!(out.xi_star > 0.0 && out.xi_star < -cp.xi_w)) {
    throw Error(ErrorKind::NoSonicCrossing,
                "xi* = " + std::to_string(out.xi_star) + " outside (0, -xi_w)");
  }
  out.branch = Branch("tilde", p, DenseCurve<2>(quintic_pieces(res, p, {}, 0.0)),
                      samples_from(res), tail);
  return out;
}

double hugoniot(double xi, const Branch& hat, const SimilarityParams& p) {
  const double top = -critical_points(p).xi_w;
  if (!(xi > 0.0 && xi <= top * (1.0 + 1e-14))) {
    throw Error(ErrorKind::DomainError,
                "Hugoniot locus defined on (0, -xi_w]; got xi=" + std::to_string(xi));
  }
  return xi + p.a() * p.a() / (hat.U(std::min(xi, top)) - xi);
}

std::string_view to_string(ShockFamily f) noexcept {
  switch (f) {
    case ShockFamily::OneShock: return "1-shock";
    case ShockFamily::TwoShock: return "2-shock";
    case ShockFamily::Inadmissible: return "inadmissible";
  }
  return "inadmissible";
}

ShockFamily classify_shock(double xi_bar, double U_minus, double U_plus, double a) {
  if (U_minus > xi_bar - a && xi_bar - a > U_plus) return ShockFamily::TwoShock;
  if (U_minus - a > xi_bar && xi_bar > U_plus - a) return ShockFamily::OneShock;
  return ShockFamily::Inadmissible;
}

ShockData find_shock(const Branch& hat, const TildeBuild& tilde, const SimilarityParams& p,
                     const ConstructionOptions& opts) {
  const double a = p.a();
  const double lo = std::max(tilde.branch.lo(), tilde.xi_star);
  const double hi = -critical_points(p).xi_w;
  if (!(lo < hi)) {
    throw Error(ErrorKind::NoBracket, "empty bracket (xi*, -xi_w)");
  }
  auto g = [&](double x) { return tilde.branch.U(x) - hugoniot(x, hat, p); };

  const std::size_t n = opts.shock_scan_points;
  std::vector<double> xs(n), gs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    gs[i] = g(xs[i]);
  }
  std::size_t count = 0, last = n;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if ((gs[i] > 0.0) != (gs[i + 1] > 0.0)) {
      ++count;
      last = i;
    }
  }
  if (count == 0) {
    std::ostringstream os;
    os << "U_tilde - H has no sign change on [" << lo << ", " << hi << "] (g(lo)=" << gs.front()
       << ", g(hi)=" << gs.back() << ")";
    throw Error(ErrorKind::NoBracket, os.str());
  }

  double xs_root;
  if (gs[last] == 0.0) {
    xs_root = xs[last];
  } else if (gs[last + 1] == 0.0) {
    xs_root = xs[last + 1];
  } else {
    const double tol = opts.root_tol;
    auto stop = [tol](double l, double r) { return std::abs(r - l) <= tol; };
    std::uintmax_t iters = 200;
    auto br = boost::math::tools::toms748_solve(g, xs[last], xs[last + 1], gs[last], gs[last + 1],
                                                stop, iters);
    xs_root = 0.5 * (br.first + br.second);
  }

  ShockData sd;
  sd.xi_bar = xs_root;
  sd.root_count = count;
  sd.U_minus = hat.U(xs_root);
  sd.U_plus = tilde.branch.U(xs_root);
  sd.V_minus = sd.U_minus - xs_root;
  sd.V_plus = sd.U_plus - xs_root;
  sd.vv_residual = std::abs(sd.V_plus * sd.V_minus - a * a) / (a * a);
  sd.margin_inner = sd.U_minus - (xs_root - a);
  sd.margin_outer = (xs_root - a) - sd.U_plus;
  sd.family = classify_shock(xs_root, sd.U_minus, sd.U_plus, a);
  if (sd.family != ShockFamily::TwoShock) {
    std::ostringstream os;
    os << "intersection at xi=" << xs_root << " is not an admissible 2-shock (U-=" << sd.U_minus
       << ", U+=" << sd.U_plus << ")";
    throw Error(ErrorKind::EntropyViolation, os.str());
  }
  return sd;
}

VelocityProfile::VelocityProfile(SimilarityParams params, Branch hat, KinkBuild kink,
                                 TildeBuild tilde, ShockData shock)
    : params_(params),
      hat_(std::move(hat)),
      kink_(std::move(kink)),
      tilde_(std::move(tilde)),
      shock_(shock),
      xi_w_(critical_points(params).xi_w) {}

VelocityPiece VelocityProfile::piece(double xi) const {
  if (xi <= xi_w_) return VelocityPiece::Kink;
  if (xi <= shock_.xi_bar) return VelocityPiece::Hat;
  return VelocityPiece::Tilde;
}

const Branch& VelocityProfile::branch(VelocityPiece p) const {
  switch (p) {
    case VelocityPiece::Kink: return kink_.branch;
    case VelocityPiece::Hat: return hat_;
    case VelocityPiece::Tilde: return tilde_.branch;
  }
  return hat_;
}

double VelocityProfile::max_residual() const {
  return std::max({kink_.branch.max_midpoint_residual(kink_.branch.lo(), xi_w_),
                   hat_.max_midpoint_residual(xi_w_, shock_.xi_bar),
                   tilde_.branch.max_midpoint_residual(shock_.xi_bar, tilde_.branch.hi())});
}

double VelocityProfile::U(double xi) const { return branch(piece(xi)).U(xi); }
double VelocityProfile::dU(double xi) const { return branch(piece(xi)).dU(xi); }

VelocityProfile assemble_velocity(const SimilarityParams& params, Branch hat, KinkBuild kink,
                                  TildeBuild tilde, ShockData shock) {
  return VelocityProfile(params, std::move(hat), std::move(kink), std::move(tilde), shock);
}

VelocityProfile build_velocity_profile(const SimilarityParams& params,
                                       const ConstructionOptions& opts) {
  Branch hat = build_hat(params, opts);
  KinkBuild kink = build_kink(params, opts);
  TildeBuild tilde = build_tilde(params, kink.u_star, opts);
  ShockData shock = find_shock(hat, tilde, params, opts);
  return assemble_velocity(params, std::move(hat), std::move(kink), std::move(tilde), shock);
}

}  // namespace isofocus
