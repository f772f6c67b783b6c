#include "isofocus/weak_verifier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "isofocus/error.hpp"

namespace isofocus {

namespace {

constexpr double kGrading = 4.0;
constexpr int kGaussPoints = 8;

double smootherstep(double x) { return x * x * x * (x * (6.0 * x - 15.0) + 10.0); }
double smootherstep_d(double x) { return 30.0 * x * x * (x * (x - 2.0) + 1.0); }

using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

template <class F>
double gk(F&& f, double lo, double hi, double tol, const char* what) {
  if (!(hi > lo)) return 0.0;
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

struct Node {
  double x;
  double w;
};

// Gauss-Legendre nodes on one cell.
void gauss_cell(double lo, double hi, std::vector<Node>& out) {
  using G = boost::math::quadrature::gauss<double, kGaussPoints>;
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      out.push_back({c, h * w[i]});
      continue;
    }
    out.push_back({c - h * x[i], h * w[i]});
    out.push_back({c + h * x[i], h * w[i]});
  }
}

// n cells on [lo, hi], graded algebraically toward the flagged ends.
void graded_cells(double lo, double hi, int n, bool grade_lo, bool grade_hi,
                  std::vector<Node>& out) {
  if (!(hi > lo)) return;
  if (grade_lo && grade_hi) {
    const double mid = 0.5 * (lo + hi);
    graded_cells(lo, mid, std::max(1, n / 2), true, false, out);
    graded_cells(mid, hi, std::max(1, n / 2), false, true, out);
    return;
  }
  const double len = hi - lo;
  auto node = [&](int k) {
    const double s = static_cast<double>(k) / n;
    if (grade_lo) return lo + len * std::pow(s, kGrading);
    if (grade_hi) return hi - len * std::pow(1.0 - s, kGrading);
    return lo + len * s;
  };
  double x0 = lo;
  for (int k = 1; k <= n; ++k) {
    const double x1 = k == n ? hi : node(k);
    gauss_cell(x0, x1, out);
    x0 = x1;
  }
}

std::vector<double> breaks_within(std::vector<double> pts, double lo, double hi) {
  std::vector<double> out{lo, hi};
  for (double p : pts) {
    if (std::isfinite(p) && p > lo && p < hi) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  std::vector<double> uniq;
  for (double p : out) {
    if (uniq.empty() || p - uniq.back() > 1e-14 * std::max(1.0, std::abs(p))) uniq.push_back(p);
  }
  uniq.back() = hi;
  return uniq;
}

bool near(double x, double y) { return std::abs(x - y) <= 1e-14 * std::max(1.0, std::abs(y)); }

struct FormTotals {
  double value = 0.0;
  double scale = 0.0;
  double strip = 0.0;
};

struct PassResult {
  FormTotals mass;
  FormTotals momentum;
};

// One tensor-quadrature pass over the support for both weak forms.
PassResult quadrature_pass(const SimilaritySolution& sol, const TestFunction& psi, int level,
                           double delta, bool momentum) {
  const int m = sol.params().m();
  const double a2 = sol.params().a() * sol.params().a();
  const double xi_w = sol.velocity().xi_w();
  const double xi_s = sol.velocity().xi_s();
  const int n = 1 << level;

  std::vector<double> tb{psi.T.b, psi.T.c, 0.0};
  for (double rk : psi.R.knots()) {
    if (rk > 0.0) {
      tb.push_back(rk / xi_w);
      tb.push_back(rk / xi_s);
    }
  }
  const auto tbreaks = breaks_within(tb, psi.T.a, psi.T.d);
  std::vector<Node> tnodes;
  for (std::size_t i = 0; i + 1 < tbreaks.size(); ++i) {
    graded_cells(tbreaks[i], tbreaks[i + 1], n, tbreaks[i] == 0.0, tbreaks[i + 1] == 0.0, tnodes);
  }

  PassResult out;
  std::vector<Node> rnodes;
  for (const Node& tn : tnodes) {
    const double t = tn.x;
    const double Tv = psi.T.value(t), Td = psi.T.derivative(t);
    if (Tv == 0.0 && Td == 0.0) continue;
    const double wave = t < 0.0 ? sol.kink_radius(t) : sol.shock_radius(t);
    const auto rbreaks = breaks_within({psi.R.b, psi.R.c, wave, delta}, psi.R.a, psi.R.d);
    rnodes.clear();
    for (std::size_t j = 0; j + 1 < rbreaks.size(); ++j) {
      const double lo = rbreaks[j], hi = rbreaks[j + 1];
      graded_cells(lo, hi, n, lo == 0.0 || near(lo, wave), near(hi, wave), rnodes);
    }
    for (const Node& rn : rnodes) {
      const double r = rn.x;
      const double Rv = psi.R.value(r), Rd = psi.R.derivative(r);
      if (Rv == 0.0 && Rd == 0.0) continue;
      const FieldValue f = sol.evaluate(t, r);
      const double w = tn.w * rn.w * std::pow(r, m);
      const double pt = Td * Rv, pr = Tv * Rd;
      const double m1 = f.rho * pt, m2 = f.rho * f.u * pr;
      const bool in_strip = r < delta;
      out.mass.value += w * (m1 + m2);
      out.mass.scale += w * (std::abs(m1) + std::abs(m2));
      if (in_strip) out.mass.strip += w * (m1 + m2);
      if (momentum) {
        const double i1 = f.rho * f.u * pt, i2 = f.rho * f.u * f.u * pr;
        const double i3 = a2 * f.rho * (pr + m * Tv * Rv / r);
        out.momentum.value += w * (i1 + i2 + i3);
        out.momentum.scale += w * (std::abs(i1) + std::abs(i2) + std::abs(i3));
        if (in_strip) out.momentum.strip += w * (i1 + i2 + i3);
      }
    }
  }
  return out;
}

// -delta^m int flux(t, delta) psi(t, delta) dt.
double boundary_term(const SimilaritySolution& sol, const TestFunction& psi, WeakForm form,
                     double delta) {
  if (!(delta > psi.R.a && delta < psi.R.d)) return 0.0;
  const double a2 = sol.params().a() * sol.params().a();
  const double tol = sol.options().quad_tol;
  auto f = [&](double t) {
    if (t == 0.0) return 0.0;
    const FieldValue v = sol.evaluate(t, delta);
    const double flux = form == WeakForm::Mass ? v.rho * v.u : v.rho * (v.u * v.u + a2);
    return flux * psi.value(t, delta);
  };
  // Also split where the amplitude changes representation.
  const auto& v = sol.velocity();
  const auto br = breaks_within({psi.T.b, psi.T.c, 0.0, delta / v.xi_w(), delta / v.xi_s(),
                                 delta / v.kink_build().xi_min, delta / v.tilde_build().xi_max,
                                 delta * sol.density().tilde().x0},
                                psi.T.a, psi.T.d);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double lo = br[i], hi = br[i + 1];
    if (lo == 0.0 || hi == 0.0) {
      total += gk(f, lo, hi, tol, "boundary");
      continue;
    }
    // In log|t| the amplitude varies on a uniform scale.
    const double sg = lo < 0.0 ? -1.0 : 1.0;
    const double u0 = std::log(std::abs(lo)), u1 = std::log(std::abs(hi));
    auto g = [&](double u) {
      const double at = std::exp(u);
      return f(sg * at) * at;
    };
    total += gk(g, std::min(u0, u1), std::max(u0, u1), tol, "boundary");
  }
  return -std::pow(delta, sol.params().m()) * total;
}

// Flux jump along r = xi_s t for t where the line lies above delta.
double shock_term(const SimilaritySolution& sol, const TestFunction& psi, WeakForm form,
                  double delta) {
  const auto& sh = sol.shock();
  const double a2 = sol.params().a() * sol.params().a();
  const double xi_s = sol.velocity().xi_s();
  const double vm = sh.U_minus - xi_s, vp = sh.U_plus - xi_s;
  const double jump = form == WeakForm::Mass
                          ? sh.Omega_minus * vm - sh.Omega_plus * vp
                          : sh.Omega_minus * (sh.U_minus * vm + a2) -
                                sh.Omega_plus * (sh.U_plus * vp + a2);
  const double lo = std::max({psi.T.a, delta / xi_s, psi.R.a / xi_s, 0.0});
  const double hi = std::min(psi.T.d, psi.R.d / xi_s);
  if (!(hi > lo)) return 0.0;
  const int m = sol.params().m();
  const double beta = sol.params().beta();
  auto f = [&](double t) {
    const double r = xi_s * t;
    return psi.value(t, r) * std::pow(r, m) * std::pow(t, beta);
  };
  std::vector<double> pts{psi.T.b, psi.T.c};
  for (double rk : psi.R.knots()) pts.push_back(rk / xi_s);
  const auto br = breaks_within(pts, lo, hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    total += gk(f, br[i], br[i + 1], sol.options().quad_tol, "shock term");
  }
  return jump * total;
}

double delta_for_level(int level) { return std::ldexp(1.0, -2 * level); }

WeakResidual finish(const std::string& name, WeakForm form, int level, double delta,
                    const FormTotals& tot, const SimilaritySolution& sol,
                    const TestFunction& psi) {
  WeakResidual w;
  w.psi = name;
  w.form = form;
  w.level = level;
  w.residual = tot.value;
  w.scale = tot.scale;
  w.delta = delta;
  w.strip = tot.strip;
  w.boundary = boundary_term(sol, psi, form, delta);
  w.shock = shock_term(sol, psi, form, delta);
  w.identity_gap = std::abs((w.residual - w.strip) - (w.boundary + w.shock));
  return w;
}

void require_class(const TestFunction& psi, WeakForm form) {
  if (form == WeakForm::Momentum && psi.test_class() != TestClass::C10) {
    throw Error(ErrorKind::ClassViolation,
                "momentum form needs psi(t, 0) = 0; '" + psi.name + "' does not vanish at r = 0");
  }
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace

double Plateau::value(double x) const {
  if (x < a || x > d) return 0.0;
  if (x < b) return smootherstep((x - a) / (b - a));
  if (x <= c) return 1.0;
  return smootherstep((d - x) / (d - c));
}

double Plateau::derivative(double x) const {
  if (x < a || x > d) return 0.0;
  if (x < b) return smootherstep_d((x - a) / (b - a)) / (b - a);
  if (x <= c) return 0.0;
  return -smootherstep_d((d - x) / (d - c)) / (d - c);
}

std::vector<TestFunction> default_battery(const SimilaritySolution& sol) {
  const double w = -sol.velocity().xi_w();
  const double s = sol.velocity().xi_s();
  return {
      {"interior", {-1.0, -0.9, -0.6, -0.5}, {0.1 * w, 0.15 * w, 0.3 * w, 0.4 * w}},
      {"shock-straddling", {0.4, 0.5, 0.7, 0.8}, {0.2 * s, 0.3 * s, 1.0 * s, 1.2 * s}},
      {"kink-straddling", {-0.8, -0.7, -0.5, -0.4}, {0.2 * w, 0.3 * w, 1.0 * w, 1.2 * w}},
      {"collapse-covering", {-0.4, 0.4, 0.5, 0.7}, {0.0, 0.2 * w, 0.4 * w, 0.5 * w}},
      {"collapse-annulus", {-0.6, -0.3, 0.3, 0.6}, {0.1 * w, 0.2 * w, 0.5 * w, 0.7 * w}},
      {"origin-c10", {-0.6, -0.3, 0.3, 0.6}, {0.0, 0.1 * w, 0.2 * w, 0.3 * w}},
      {"origin-c1c", {-0.6, -0.3, 0.3, 0.6}, {0.0, 0.0, 0.2 * w, 0.3 * w}},
      {"large-support", {-2.0, -1.0, 1.0, 2.0}, {0.0, w, 2.0 * w, 3.0 * w}},
  };
}

RHCheck check_rh(const SimilaritySolution& sol, const std::vector<double>& t_grid,
                 double tolerance) {
  RHCheck c;
  c.tolerance = tolerance;
  const double a2 = sol.params().a() * sol.params().a();
  const double xi_s = sol.velocity().xi_s();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw Error(ErrorKind::DomainError, "RH times must be positive");
    const FieldValue in = sol.shock_side(t, -1), out = sol.shock_side(t, +1);
    const double fin = in.rho * (in.u - xi_s), fout = out.rho * (out.u - xi_s);
    const double mass = std::abs(fin - fout) / std::max(std::abs(fin), std::abs(fout));
    const double pin = fin * in.u + a2 * in.rho, pout = fout * out.u + a2 * out.rho;
    const double mom = std::abs(pin - pout) / std::max(std::abs(pin), std::abs(pout));
    c.t.push_back(t);
    c.mass.push_back(mass);
    c.momentum.push_back(mom);
    const double worst = std::max(mass, mom);
    c.max_residual = std::max(c.max_residual, worst);
    lo = std::min(lo, worst);
    hi = std::max(hi, worst);
  }
  c.spread = t_grid.empty() ? 0.0 : hi - lo;
  c.pass = c.max_residual <= tolerance;
  return c;
}

EntropyCheck check_entropy(const SimilaritySolution& sol, double vv_tolerance) {
  const auto& sh = sol.shock();
  const double a = sol.params().a();
  EntropyCheck e;
  e.vv_tolerance = vv_tolerance;
  e.margin_inner = sh.margin_inner;
  e.margin_outer = sh.margin_outer;
  e.vv_residual = std::abs(sh.V_plus * sh.V_minus - a * a) / (a * a);
  e.pass = e.margin_inner > 0.0 && e.margin_outer > 0.0 && e.vv_residual <= vv_tolerance;
  return e;
}

OneSidedLimit extrapolate_to_zero(const std::vector<double>& t, const std::vector<double>& f,
                                  double p) {
  OneSidedLimit out;
  out.t = t;
  out.values = f;
  const bool log_term = std::abs(p - 2.0) < 1e-9;
  auto fit = [&](std::size_t first) {
    const auto rows = static_cast<Eigen::Index>(t.size() - first);
    Eigen::MatrixXd A(rows, 4);
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double s = std::abs(t[first + static_cast<std::size_t>(i)]);
      A(i, 0) = 1.0;
      A(i, 1) = s;
      A(i, 2) = log_term ? s * s * std::log(s) : std::pow(s, p);
      A(i, 3) = s * s;
      b(i) = f[first + static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
    const double rms = rows > 4 ? (A * x - b).norm() / std::sqrt(static_cast<double>(rows - 4)) : 0.0;
    return std::pair<double, double>{x(0), rms};
  };
  if (t.size() < 8) throw Error(ErrorKind::DomainError, "extrapolation needs at least 8 samples");
  const auto [full, rms] = fit(0);
  const auto [tail, rms_tail] = fit(3);
  out.limit = full;
  out.error = std::abs(full - tail) + 3.0 * std::max(rms, rms_tail);
  return out;
}

ContinuityCheck check_continuity(const SimilaritySolution& sol, double r_bar, int k_min, int k_max,
                                 double rel_tolerance) {
  if (!(r_bar > 0.0)) throw Error(ErrorKind::DomainError, "r_bar must be positive");
  ContinuityCheck c;
  c.r_bar = r_bar;
  c.rel_tolerance = rel_tolerance;
  const double p = sol.params().beta() + sol.params().n();
  const double cm = std::abs(sol.density().C_minus());
  const double cm_rel = sol.density().C_minus_error() / cm;
  c.pass = true;
  for (int q = 0; q <= 2; ++q) {
    ContinuityQuantity qq;
    qq.name = q == 0 ? "M" : "I" + std::to_string(q);
    std::vector<double> tb, fb, ta, fa;
    // Higher-order terms dominate for |t| near 1; the fit starts at 2^-4.
    for (int k = std::max(k_min, 4); k <= k_max; ++k) {
      const double t = std::ldexp(1.0, -k);
      tb.push_back(-t);
      ta.push_back(t);
      fb.push_back(q == 0 ? sol.mass_integral(-t, r_bar) : sol.moment_integral(-t, r_bar, q));
      fa.push_back(q == 0 ? sol.mass_integral(t, r_bar) : sol.moment_integral(t, r_bar, q));
    }
    qq.below = extrapolate_to_zero(tb, fb, p);
    qq.above = extrapolate_to_zero(ta, fa, p);
    qq.closed_form = sol.collapse_moment(r_bar, q);
    qq.gap = std::abs(qq.below.limit - qq.above.limit);
    qq.error_bar = qq.below.error + qq.above.error +
                   10.0 * sol.options().quad_tol * std::abs(qq.closed_form);
    qq.rel_closed = std::max(std::abs(qq.below.limit - qq.closed_form),
                             std::abs(qq.above.limit - qq.closed_form)) /
                    std::abs(qq.closed_form);
    // The closed form carries the C- error; the relative tolerance must
    // exceed it to be meaningful.
    qq.pass = qq.gap <= qq.error_bar && qq.rel_closed <= rel_tolerance &&
              cm_rel < rel_tolerance;
    c.pass = c.pass && qq.pass;
    c.quantities.push_back(std::move(qq));
  }
  return c;
}

namespace {

// delta^(n+beta) int_{|xi| >= delta/T} |Omega| g(U) |xi|^(-beta-2) dxi, in log|xi|.
template <class G>
double flux_xi(const SimilaritySolution& sol, double T, double delta, G&& g) {
  if (!(delta > 0.0) || !(T > 0.0)) throw Error(ErrorKind::DomainError, "delta, T must be positive");
  const auto& v = sol.velocity();
  const double beta = sol.params().beta();
  const double tol = sol.options().quad_tol;
  const double s0 = delta / T;
  double total = 0.0;
  for (int sigma : {-1, 1}) {
    std::vector<double> cuts =
        sigma < 0 ? std::vector<double>{-v.xi_w(), -v.kink_build().xi_min}
                  : std::vector<double>{v.xi_s(), v.tilde_build().xi_max,
                                        1.0 / sol.density().tilde().x0};
    double top = s0;
    for (double c : cuts) top = std::max(top, c);
    std::vector<double> pts;
    for (double c : cuts) pts.push_back(std::log(c));
    const auto br = breaks_within(pts, std::log(s0), std::log(top) + 50.0);
    auto f = [&](double w) {
      const double s = std::exp(w);
      const double xi = sigma * s;
      const double om = std::abs(sol.density().Omega(xi));
      return om * g(v.U(xi)) * std::pow(s, -beta - 1.0);
    };
    for (std::size_t i = 0; i + 1 < br.size(); ++i) total += gk(f, br[i], br[i + 1], tol, "flux");
  }
  return std::pow(delta, sol.params().n() + beta) * total;
}

}  // namespace

double mass_flux_at(const SimilaritySolution& sol, double T, double delta) {
  return flux_xi(sol, T, delta, [](double) { return 1.0; });
}

double momentum_flux_at(const SimilaritySolution& sol, double T, double delta) {
  const double a2 = sol.params().a() * sol.params().a();
  return flux_xi(sol, T, delta, [a2](double u) { return u * u + a2; });
}

FluxCheck check_flux(const SimilaritySolution& sol, double T, const std::vector<double>& deltas,
                     double slope_tolerance) {
  if (deltas.size() < 4) throw Error(ErrorKind::DomainError, "flux check needs at least 4 deltas");
  FluxCheck c;
  c.T = T;
  c.delta = deltas;
  c.slope_tolerance = slope_tolerance;
  for (double d : deltas) {
    c.mass_flux.push_back(mass_flux_at(sol, T, d));
    c.momentum_flux.push_back(momentum_flux_at(sol, T, d));
  }
  c.decreasing = true;
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    if (!(deltas[i] < deltas[i - 1])) throw Error(ErrorKind::DomainError, "deltas must decrease");
    c.decreasing = c.decreasing && c.mass_flux[i] < c.mass_flux[i - 1] &&
                   c.momentum_flux[i] < c.momentum_flux[i - 1];
  }
  const double beta = sol.params().beta();
  const double nb = sol.params().n() + beta;
  auto bound = [&](double d) {
    if (std::abs(beta + 1.0) < 1e-12) return std::pow(d, nb) * (1.0 + std::abs(std::log(d)));
    return std::pow(d, nb) * (1.0 + std::pow(d, -(beta + 1.0)));
  };
  std::vector<double> x, y, yb;
  for (std::size_t i = deltas.size() - 4; i < deltas.size(); ++i) {
    x.push_back(std::log(deltas[i]));
    y.push_back(std::log(c.mass_flux[i]));
    yb.push_back(std::log(bound(deltas[i])));
  }
  c.fitted_slope = lsq_slope(x, y);
  c.predicted_slope = lsq_slope(x, yb);
  c.pass = c.decreasing &&
           std::abs(c.fitted_slope - c.predicted_slope) <= slope_tolerance * std::abs(c.predicted_slope);
  return c;
}

WeakResidual weak_residual(const SimilaritySolution& sol, const TestFunction& psi, WeakForm form,
                           int level) {
  require_class(psi, form);
  if (level < 0 || level > 12) throw Error(ErrorKind::DomainError, "refinement level out of range");
  const double delta = delta_for_level(level);
  const auto pass = quadrature_pass(sol, psi, level, delta, form == WeakForm::Momentum);
  return finish(psi.name, form, level, delta, form == WeakForm::Mass ? pass.mass : pass.momentum,
                sol, psi);
}

WeakBatteryCheck check_weak_battery(const SimilaritySolution& sol,
                                    const std::vector<TestFunction>& battery, int level_min,
                                    int level_max, double tolerance, double rh_residual) {
  WeakBatteryCheck c;
  c.level_min = level_min;
  c.level_max = level_max;
  c.tolerance = tolerance;
  c.floor = 10.0 * sol.options().ode_rtol;
  if (battery.size() < 6) throw Error(ErrorKind::DomainError, "the battery needs at least 6 functions");

  std::vector<std::vector<PassResult>> passes(battery.size());
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const bool mom = battery[i].test_class() == TestClass::C10;
    for (int l = level_min; l <= level_max; ++l) {
      passes[i].push_back(quadrature_pass(sol, battery[i], l, delta_for_level(l), mom));
    }
  }

  c.pass = true;
  for (std::size_t i = 0; i < battery.size(); ++i) {
    const auto& psi = battery[i];
    std::vector<WeakForm> forms{WeakForm::Mass};
    if (psi.test_class() == TestClass::C10) forms.push_back(WeakForm::Momentum);
    for (WeakForm form : forms) {
      WeakBatteryEntry e;
      e.psi = psi.name;
      e.form = form;
      e.tolerance = tolerance;
      for (int l = level_min; l <= level_max; ++l) {
        const auto& pr = passes[i][static_cast<std::size_t>(l - level_min)];
        e.levels.push_back(finish(psi.name, form, l, delta_for_level(l),
                                  form == WeakForm::Mass ? pr.mass : pr.momentum, sol, psi));
      }
      e.monotone = true;
      for (std::size_t k = 1; k < e.levels.size(); ++k) {
        const double prev = std::abs(e.levels[k - 1].residual);
        const double cur = std::abs(e.levels[k].residual);
        const double fl = c.floor * e.levels[k].scale;
        e.monotone = e.monotone && (cur <= prev || cur <= fl);
      }
      const WeakResidual& last = e.levels.back();
      e.final_relative = std::abs(last.residual) / last.scale;
      bool ok = e.monotone && e.final_relative <= tolerance &&
                last.identity_gap <= tolerance * last.scale;
      if (psi.name == "shock-straddling") {
        e.rh_bound = (10.0 * rh_residual + c.floor) * last.scale;
        ok = ok && std::abs(last.residual) <= e.rh_bound;
      }
      e.pass = ok;
      c.pass = c.pass && ok;
      c.entries.push_back(std::move(e));
    }
  }
  return c;
}

VerificationReport verify(const SimilaritySolution& sol, const VerifyOptions& vo) {
  VerificationReport rep;
  rep.params = sol.params();
  rep.options = sol.options();
  rep.rh = check_rh(sol, vo.rh_times);
  rep.entropy = check_entropy(sol);
  rep.continuity = check_continuity(sol, vo.r_bar);
  std::vector<double> deltas;
  for (int j = 1; j <= vo.flux_j_max; ++j) deltas.push_back(std::ldexp(1.0, -j));
  rep.flux = check_flux(sol, vo.flux_T, deltas);

  auto add = [&](std::string name, double value, double tol, bool pass, std::string detail = {}) {
    rep.checks.push_back({std::move(name), value, tol, pass, std::move(detail)});
  };
  add("rh_residual", rep.rh.max_residual, rep.rh.tolerance, rep.rh.pass);
  add("rh_time_invariance", rep.rh.spread, 1e-12, rep.rh.spread <= 1e-12);
  add("entropy_vv", rep.entropy.vv_residual, rep.entropy.vv_tolerance,
      rep.entropy.vv_residual <= rep.entropy.vv_tolerance);
  add("entropy_margin", std::min(rep.entropy.margin_inner, rep.entropy.margin_outer), 0.0,
      rep.entropy.margin_inner > 0.0 && rep.entropy.margin_outer > 0.0, "margins must be positive");
  for (const auto& q : rep.continuity.quantities) {
    add("continuity_gap_" + q.name, q.gap, q.error_bar, q.gap <= q.error_bar);
    add("continuity_closed_" + q.name, q.rel_closed, rep.continuity.rel_tolerance,
        q.rel_closed <= rep.continuity.rel_tolerance);
  }
  add("flux_decreasing", rep.flux.mass_flux.back(), 0.0, rep.flux.decreasing,
      "value is the flux at the smallest delta");
  add("flux_slope", rep.flux.fitted_slope, rep.flux.slope_tolerance, rep.flux.pass,
      "predicted " + std::to_string(rep.flux.predicted_slope));
  if (vo.run_weak) {
    rep.weak = check_weak_battery(sol, default_battery(sol), vo.weak_level_min, vo.weak_level_max,
                                  1e-6, rep.rh.max_residual);
    for (const auto& e : rep.weak.entries) {
      add(std::string("weak_") + (e.form == WeakForm::Mass ? "mass_" : "momentum_") + e.psi,
          e.final_relative, e.tolerance, e.pass, e.monotone ? "monotone" : "not monotone");
    }
  }
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const Check& c) { return c.pass; });
  return rep;
}

}  // namespace isofocus
