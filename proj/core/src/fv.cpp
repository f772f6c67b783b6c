#include "isofocus/fv.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "isofocus/error.hpp"

namespace isofocus {

namespace {

struct Prim {
  double rho;
  double u;
};

// Cell averages of r^m and r^(m-1) over [lo, hi].
double mean_power(double lo, double hi, int k) {
  return (std::pow(hi, k + 1) - std::pow(lo, k + 1)) / ((k + 1) * (hi - lo));
}

Prim ghost(const SimilaritySolution& sol, double t, double lo, double hi) {
  const auto q = exact_cell_average(sol, t, lo, hi);
  const double rho = q[0] / mean_power(lo, hi, sol.params().m());
  return {rho, q[1] / q[0]};
}

}  // namespace

FVConfig FVConfig::defaults(const SimilaritySolution& sol, int cells) {
  FVConfig c;
  c.r_min = 0.05 * -sol.velocity().xi_w();
  c.R = 3.0;
  c.cells = cells;
  return c;
}

void validate(const FVConfig& cfg) {
  std::ostringstream os;
  if (!(cfg.r_min > 0.0) || !(cfg.R > cfg.r_min)) os << "need 0 < r_min < R; ";
  if (cfg.cells < 64) os << "need at least 64 cells; ";
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) os << "cfl must lie in (0, 1); ";
  if (!(cfg.t_start < 0.0) || !(cfg.t_end > cfg.t_start)) os << "need t_start < 0 and t_end > t_start; ";
  if (cfg.cells >= 64 && cfg.R > cfg.r_min &&
      !(cfg.r_min > (cfg.R - cfg.r_min) / cfg.cells)) {
    os << "the inner ghost cell must stay at r > 0; ";
  }
  const std::string msg = os.str();
  if (!msg.empty()) throw Error(ErrorKind::InvalidParams, "FV config: " + msg);
}

double FVState::total_mass() const { return std::accumulate(q0.begin(), q0.end(), 0.0) * dr; }

std::array<double, 2> exact_cell_average(const SimilaritySolution& sol, double t, double lo,
                                         double hi) {
  static const double x = std::sqrt(0.6);
  static const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  const double nodes[3] = {c - h * x, c, c + h * x};
  const int m = sol.params().m();
  std::array<double, 2> out{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    const FieldValue f = sol.evaluate(t, nodes[k]);
    const double rm = std::pow(nodes[k], m);
    out[0] += w[k] * rm * f.rho;
    out[1] += w[k] * rm * f.rho * f.u;
  }
  out[0] *= 0.5;
  out[1] *= 0.5;
  return out;
}

FVState init_from_similarity(const SimilaritySolution& sol, const FVConfig& cfg) {
  validate(cfg);
  FVState s;
  s.t = cfg.t_start;
  s.r_min = cfg.r_min;
  s.dr = (cfg.R - cfg.r_min) / cfg.cells;
  s.q0.resize(static_cast<std::size_t>(cfg.cells));
  s.q1.resize(s.q0.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lo = s.r_min + static_cast<double>(i) * s.dr;
    const auto q = exact_cell_average(sol, s.t, lo, lo + s.dr);
    s.q0[i] = q[0];
    s.q1[i] = q[1];
  }
  return s;
}

FVState advance(FVState s, const FVConfig& cfg, const SimilaritySolution& sol) {
  validate(cfg);
  const int m = sol.params().m();
  const double a = sol.params().a(), a2 = a * a;
  const std::size_t n = s.size();
  const double dr = s.dr;
  std::vector<double> rm(n), rm1(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = s.r_min + static_cast<double>(i) * dr;
    rm[i] = mean_power(lo, lo + dr, m);
    rm1[i] = m > 0 ? mean_power(lo, lo + dr, m - 1) : 0.0;
  }
  std::vector<Prim> w(n + 2);
  std::vector<double> f0(n + 1), f1(n + 1);
  const double mass0 = s.total_mass();
  const double r_max = s.r_min + static_cast<double>(n) * dr;

  while (s.t < cfg.t_end) {
    w[0] = ghost(sol, s.t, s.r_min - dr, s.r_min);
    w[n + 1] = ghost(sol, s.t, r_max, r_max + dr);
    double smax = 0.0;
    for (std::size_t i = 0; i < n + 2; ++i) {
      if (i > 0 && i <= n) w[i] = {s.q0[i - 1] / rm[i - 1], s.q1[i - 1] / s.q0[i - 1]};
      smax = std::max(smax, std::abs(w[i].u) + a);
    }
    if (!std::isfinite(smax)) {
      throw Error(ErrorKind::CFLViolation, "non-finite wave speed at t=" + std::to_string(s.t));
    }
    double dt = cfg.cfl * dr / smax;
    if (s.t + dt > cfg.t_end) dt = cfg.t_end - s.t;
    if (!(dt > 1e-14 * std::max(1.0, std::abs(s.t)))) {
      throw Error(ErrorKind::CFLViolation, "time step collapsed at t=" + std::to_string(s.t));
    }

    for (std::size_t i = 0; i <= n; ++i) {
      const Prim L = w[i], R = w[i + 1];
      const double rf = std::pow(s.r_min + static_cast<double>(i) * dr, m);
      const double sl = std::min(L.u - a, R.u - a), sr = std::max(L.u + a, R.u + a);
      if (std::max(std::abs(sl), std::abs(sr)) * dt > cfg.cfl * dr * (1.0 + 1e-12)) {
        throw Error(ErrorKind::CFLViolation, "Courant number exceeded at t=" + std::to_string(s.t));
      }
      const double uL0 = rf * L.rho, uL1 = rf * L.rho * L.u;
      const double uR0 = rf * R.rho, uR1 = rf * R.rho * R.u;
      const double fL0 = uL1, fL1 = rf * (L.rho * L.u * L.u + a2 * L.rho);
      const double fR0 = uR1, fR1 = rf * (R.rho * R.u * R.u + a2 * R.rho);
      if (sl >= 0.0) {
        f0[i] = fL0;
        f1[i] = fL1;
      } else if (sr <= 0.0) {
        f0[i] = fR0;
        f1[i] = fR1;
      } else {
        const double inv = 1.0 / (sr - sl);
        f0[i] = (sr * fL0 - sl * fR0 + sl * sr * (uR0 - uL0)) * inv;
        f1[i] = (sr * fL1 - sl * fR1 + sl * sr * (uR1 - uL1)) * inv;
      }
    }
    const double k = dt / dr;
    for (std::size_t i = 0; i < n; ++i) {
      const double rho = w[i + 1].rho;
      s.q0[i] -= k * (f0[i + 1] - f0[i]);
      s.q1[i] += -k * (f1[i + 1] - f1[i]) + dt * m * a2 * rho * rm1[i];
      if (!(s.q0[i] > 0.0) || !std::isfinite(s.q1[i])) {
        std::ostringstream os;
        os << "r^m rho = " << s.q0[i] << " in cell " << i << " (r=" << s.center(i)
           << ") at t=" << s.t + dt;
        throw Error(ErrorKind::PositivityLoss, os.str());
      }
    }
    s.boundary_inflow += dt * (f0[0] - f0[n]);
    s.t += dt;
    ++s.steps;
    const double defect = std::abs(s.total_mass() - (mass0 + s.boundary_inflow)) / mass0;
    s.conservation_defect = std::max(s.conservation_defect, defect);
  }
  s.t = cfg.t_end;
  return s;
}

FVError compare(const FVState& s, const SimilaritySolution& sol, double exclusion) {
  FVError e;
  const double rs = s.t > 0.0 ? sol.shock_radius(s.t) : std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lo = s.r_min + static_cast<double>(i) * s.dr, hi = lo + s.dr;
    if (std::isfinite(rs) && hi > rs - exclusion && lo < rs + exclusion) continue;
    const auto q = exact_cell_average(sol, s.t, lo, hi);
    e.l1_q0 += std::abs(s.q0[i] - q[0]) * s.dr;
    e.l1_q1 += std::abs(s.q1[i] - q[1]) * s.dr;
  }
  return e;
}

FrontCapture extract_front(const FVState& s, const SimilaritySolution& sol, double window) {
  if (!(s.t > 0.0)) throw Error(ErrorKind::DomainError, "front extraction needs t > 0");
  FrontCapture fc;
  fc.r_exact = sol.shock_radius(s.t);
  const auto& sh = sol.shock();
  const int m = sol.params().m();
  const double scale = std::pow(fc.r_exact, m) * std::pow(s.t, sol.params().beta());
  const double jump = scale * (sh.Omega_minus - sh.Omega_plus);
  double excess = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lo = s.r_min + static_cast<double>(i) * s.dr, hi = lo + s.dr;
    if (hi < fc.r_exact - window || lo > fc.r_exact + window) continue;
    excess += (s.q0[i] - exact_cell_average(sol, s.t, lo, hi)[0]) * s.dr;
  }
  fc.r_front = fc.r_exact + excess / jump;
  fc.cells_off = std::abs(fc.r_front - fc.r_exact) / s.dr;

  // One-sided states outside the smeared zone.
  constexpr double kOffsetCells = 6.0;
  auto u_at = [&](double r) {
    const double x = (r - s.r_min) / s.dr - 0.5;
    const auto i = static_cast<std::size_t>(std::clamp(std::lround(x), 0L, static_cast<long>(s.size()) - 1));
    return s.q1[i] / s.q0[i];
  };
  fc.u_inner = u_at(fc.r_front - kOffsetCells * s.dr);
  fc.u_outer = u_at(fc.r_front + kOffsetCells * s.dr);
  fc.speed_minus_a = fc.r_front / s.t - sol.params().a();
  fc.entropy_ok = fc.u_inner > fc.speed_minus_a && fc.speed_minus_a > fc.u_outer;
  return fc;
}

FVConvergence run_convergence(const SimilaritySolution& sol, const std::vector<int>& cells,
                              double exclusion) {
  FVConvergence c;
  c.exclusion = exclusion;
  for (int n : cells) {
    const FVConfig cfg = FVConfig::defaults(sol, n);
    FVState s = advance(init_from_similarity(sol, cfg), cfg, sol);
    FVRow row;
    row.cells = n;
    row.error = compare(s, sol, exclusion);
    row.steps = s.steps;
    row.conservation_defect = s.conservation_defect;
    row.front = extract_front(s, sol);
    if (!c.rows.empty()) {
      const auto& prev = c.rows.back();
      const double ratio = static_cast<double>(n) / prev.cells;
      row.rate_q0 = std::log(prev.error.l1_q0 / row.error.l1_q0) / std::log(ratio);
      row.rate_q1 = std::log(prev.error.l1_q1 / row.error.l1_q1) / std::log(ratio);
    }
    c.rows.push_back(row);
  }
  if (c.rows.size() >= 2) {
    const auto& last = c.rows.back();
    c.pass = last.rate_q0 >= c.min_rate && last.rate_q1 >= c.min_rate &&
             last.front.cells_off <= c.front_cells && last.front.entropy_ok &&
             last.conservation_defect <= 1e-10;
  }
  return c;
}

}  // namespace isofocus
