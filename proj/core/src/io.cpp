#include "isofocus/io.hpp"

#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>

namespace isofocus::io {

namespace {

using nlohmann::json;

struct Precise {
  explicit Precise(std::ostream& os) : os_(os), flags_(os.flags()), prec_(os.precision()) {
    os_ << std::setprecision(17);
  }
  ~Precise() {
    os_.flags(flags_);
    os_.precision(prec_);
  }
  std::ostream& os_;
  std::ios::fmtflags flags_;
  std::streamsize prec_;
};

void params_header(std::ostream& os, const SimilarityParams& p) {
  os << "# m=" << p.m() << " beta=" << p.beta() << " a=" << p.a() << "\n";
}

json options_json(const ConstructionOptions& o) {
  return {{"ode_rtol", o.ode_rtol},
          {"ode_atol", o.ode_atol},
          {"root_tol", o.root_tol},
          {"quad_tol", o.quad_tol},
          {"node_eps_rel", o.node_eps_rel},
          {"node_exclusion_rel", o.node_exclusion_rel},
          {"hat_tol_factor", o.hat_tol_factor},
          {"origin_offset_rel", o.origin_offset_rel},
          {"sonic_guard", o.sonic_guard},
          {"xi_min_factor", o.xi_min_factor},
          {"xi_max_factor", o.xi_max_factor},
          {"x0_rel", o.x0_rel},
          {"omega0", o.omega0},
          {"shock_scan_points", o.shock_scan_points},
          {"h_max_rel", o.h_max_rel},
          {"node_sensitivity_check", o.node_sensitivity_check},
          {"omega_plus_perturbation", o.omega_plus_perturbation}};
}

ConstructionOptions options_from(const json& j) {
  ConstructionOptions o;
  o.ode_rtol = j.at("ode_rtol").get<double>();
  o.ode_atol = j.at("ode_atol").get<double>();
  o.root_tol = j.at("root_tol").get<double>();
  o.quad_tol = j.at("quad_tol").get<double>();
  o.node_eps_rel = j.at("node_eps_rel").get<double>();
  o.node_exclusion_rel = j.at("node_exclusion_rel").get<double>();
  o.hat_tol_factor = j.at("hat_tol_factor").get<double>();
  o.origin_offset_rel = j.at("origin_offset_rel").get<double>();
  o.sonic_guard = j.at("sonic_guard").get<double>();
  o.xi_min_factor = j.at("xi_min_factor").get<double>();
  o.xi_max_factor = j.at("xi_max_factor").get<double>();
  o.x0_rel = j.at("x0_rel").get<double>();
  o.omega0 = j.at("omega0").get<double>();
  o.shock_scan_points = j.at("shock_scan_points").get<std::size_t>();
  o.h_max_rel = j.at("h_max_rel").get<double>();
  o.node_sensitivity_check = j.at("node_sensitivity_check").get<bool>();
  o.omega_plus_perturbation = j.at("omega_plus_perturbation").get<double>();
  return o;
}

json check_json(const Check& c) {
  return {{"name", c.name},
          {"value", c.value},
          {"tolerance", c.tolerance},
          {"pass", c.pass},
          {"detail", c.detail}};
}

json limit_json(const OneSidedLimit& l) {
  return {{"t", l.t}, {"values", l.values}, {"limit", l.limit}, {"error", l.error}};
}

}  // namespace

std::string_view piece_name(VelocityPiece p) noexcept {
  switch (p) {
    case VelocityPiece::Kink: return "kink";
    case VelocityPiece::Hat: return "hat";
    case VelocityPiece::Tilde: return "tilde";
  }
  return "hat";
}

std::string_view piece_name(DensityPiece p) noexcept {
  switch (p) {
    case DensityPiece::Kink: return "kink";
    case DensityPiece::HatNeg: return "hat-";
    case DensityPiece::HatPos: return "hat+";
    case DensityPiece::Tilde: return "tilde";
  }
  return "hat-";
}

void write_branch_csv(std::ostream& os, const Branch& b) {
  Precise guard(os);
  params_header(os, b.params());
  os << "# branch=" << b.name() << "\n";
  os << "xi,U,dU,L\n";
  for (const auto& s : b.samples()) os << s.xi << ',' << s.U << ',' << s.dU << ',' << s.L << '\n';
}

void write_profile_csv(std::ostream& os, const SimilaritySolution& sol,
                       const std::vector<double>& xi) {
  Precise guard(os);
  params_header(os, sol.params());
  os << "xi,u_piece,U,dU,omega_piece,Omega\n";
  const auto& v = sol.velocity();
  const auto& d = sol.density();
  for (double x : xi) {
    os << x << ',' << piece_name(v.piece(x)) << ',' << v.U(x) << ',' << v.dU(x) << ','
       << piece_name(d.piece(x)) << ',' << d.Omega(x) << '\n';
  }
}

std::vector<double> default_xi_grid(const SimilaritySolution& sol, int n) {
  if (n < 2) throw Error(ErrorKind::DomainError, "grid needs at least 2 points");
  const double lo = 3.0 * sol.velocity().xi_w(), hi = 3.0 * sol.velocity().xi_s();
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Cell centres, so that xi = 0 is never hit.
    g.push_back(lo + (hi - lo) * (i + 0.5) / n);
  }
  for (double& x : g) {
    if (x == 0.0) x = 1e-12 * (hi - lo);
  }
  return g;
}

void write_field_csv(std::ostream& os, const SimilaritySolution& sol, double t,
                     const std::vector<double>& r) {
  Precise guard(os);
  params_header(os, sol.params());
  os << "t,r,rho,u\n";
  for (double x : r) {
    const FieldValue f = sol.evaluate(t, x);
    os << t << ',' << x << ',' << f.rho << ',' << f.u << '\n';
  }
}

void write_trace_csv(std::ostream& os, const PathTrace& tr) {
  Precise guard(os);
  os << "# kind=" << to_string(tr.kind) << " termination=" << to_string(tr.termination) << "\n";
  os << "t,r\n";
  for (const auto& n : tr.nodes) os << n[0] << ',' << n[1] << '\n';
}

void write_trace_events_csv(std::ostream& os, const PathTrace& tr) {
  Precise guard(os);
  os << "event,t,r,speed\n";
  for (const auto& e : tr.events) os << e.what << ',' << e.t << ',' << e.r << ',' << e.speed << '\n';
}

void write_fv_convergence_csv(std::ostream& os, const FVConvergence& c) {
  Precise guard(os);
  os << "N,L1_q0,L1_q1,rate_q0,rate_q1,steps,front_cells_off\n";
  for (const auto& r : c.rows) {
    os << r.cells << ',' << r.error.l1_q0 << ',' << r.error.l1_q1 << ',' << r.rate_q0 << ','
       << r.rate_q1 << ',' << r.steps << ',' << r.front.cells_off << '\n';
  }
}

void write_fv_snapshot_csv(std::ostream& os, const FVState& s, const SimilaritySolution& sol) {
  Precise guard(os);
  os << "# t=" << s.t << "\n";
  os << "r,q0,q1,q0_exact,q1_exact\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double lo = s.r_min + static_cast<double>(i) * s.dr;
    const auto q = exact_cell_average(sol, s.t, lo, lo + s.dr);
    os << s.center(i) << ',' << s.q0[i] << ',' << s.q1[i] << ',' << q[0] << ',' << q[1] << '\n';
  }
}

std::string manifest_json(const SimilaritySolution& sol) {
  const auto& p = sol.params();
  const auto& v = sol.velocity();
  const auto& d = sol.density();
  const auto& sh = sol.shock();
  json j;
  j["schema"] = kManifestSchema;
  j["params"] = {{"m", p.m()}, {"beta", p.beta()}, {"a", p.a()}, {"omega0", d.Omega0()}};
  j["options"] = options_json(sol.options());
  j["derived"] = {{"xi_w", v.xi_w()},
                  {"xi_s", v.xi_s()},
                  {"xi_star", v.xi_star()},
                  {"u_star", v.u_star()},
                  {"u_star_error", v.kink_build().u_star_error},
                  {"C_minus", d.C_minus()},
                  {"C_minus_error", d.C_minus_error()},
                  {"C_plus", d.C_plus()},
                  {"Omega_w", d.Omega_w()},
                  {"Omega0_prime", d.Omega0_prime()},
                  {"Omega_plus", d.Omega_plus()},
                  {"Omega_minus", d.Omega_minus()},
                  {"U_minus", sh.U_minus},
                  {"U_plus", sh.U_plus},
                  {"xi_min", v.kink_build().xi_min},
                  {"xi_max", v.tilde_build().xi_max},
                  {"x0", d.tilde().x0}};
  return j.dump(2);
}

Manifest parse_manifest(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::IoError, std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("schema").get<std::string>() != kManifestSchema) {
      throw Error(ErrorKind::IoError, "unsupported manifest schema '" +
                                          j.at("schema").get<std::string>() + "'");
    }
    Manifest m;
    const auto& p = j.at("params");
    m.params = SimilarityParams::make(p.at("m").get<int>(), p.at("beta").get<double>(),
                                      p.at("a").get<double>());
    m.options = options_from(j.at("options"));
    const auto& d = j.at("derived");
    m.xi_s = d.at("xi_s").get<double>();
    m.u_star = d.at("u_star").get<double>();
    m.C_minus = d.at("C_minus").get<double>();
    m.Omega0_prime = d.at("Omega0_prime").get<double>();
    m.Omega_plus = d.at("Omega_plus").get<double>();
    m.Omega_minus = d.at("Omega_minus").get<double>();
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::IoError, std::string("manifest is incomplete: ") + e.what());
  }
}

SimilaritySolution rebuild(const Manifest& m) {
  SimilaritySolution sol = SimilaritySolution::build(m.params, m.options);
  const auto& d = sol.density();
  const bool same = sol.velocity().xi_s() == m.xi_s && sol.velocity().u_star() == m.u_star &&
                    d.C_minus() == m.C_minus && d.Omega0_prime() == m.Omega0_prime &&
                    d.Omega_plus() == m.Omega_plus && d.Omega_minus() == m.Omega_minus;
  if (!same) {
    throw Error(ErrorKind::IoError, "rebuilt solution does not reproduce the manifest constants");
  }
  return sol;
}

std::string report_json(const VerificationReport& rep) {
  json j;
  j["schema"] = kReportSchema;
  j["params"] = {{"m", rep.params.m()}, {"beta", rep.params.beta()}, {"a", rep.params.a()}};
  j["options"] = options_json(rep.options);
  j["pass"] = rep.pass;
  json checks = json::array();
  for (const auto& c : rep.checks) checks.push_back(check_json(c));
  j["checks"] = checks;

  j["rh_residuals"] = {{"t", rep.rh.t},
                       {"mass", rep.rh.mass},
                       {"momentum", rep.rh.momentum},
                       {"max", rep.rh.max_residual},
                       {"spread", rep.rh.spread},
                       {"tolerance", rep.rh.tolerance},
                       {"pass", rep.rh.pass}};
  j["entropy_margins"] = {{"inner", rep.entropy.margin_inner},
                          {"outer", rep.entropy.margin_outer},
                          {"vv_residual", rep.entropy.vv_residual},
                          {"vv_tolerance", rep.entropy.vv_tolerance},
                          {"tolerance", 0.0},
                          {"pass", rep.entropy.pass}};
  json cont = json::array();
  for (const auto& q : rep.continuity.quantities) {
    cont.push_back({{"name", q.name},
                    {"below", limit_json(q.below)},
                    {"above", limit_json(q.above)},
                    {"closed_form", q.closed_form},
                    {"gap", q.gap},
                    {"error_bar", q.error_bar},
                    {"rel_closed", q.rel_closed},
                    {"tolerance", rep.continuity.rel_tolerance},
                    {"pass", q.pass}});
  }
  j["continuity_gaps"] = {{"r_bar", rep.continuity.r_bar}, {"quantities", cont},
                          {"pass", rep.continuity.pass}};
  j["flux_scaling"] = {{"T", rep.flux.T},
                       {"delta", rep.flux.delta},
                       {"mass_flux", rep.flux.mass_flux},
                       {"momentum_flux", rep.flux.momentum_flux},
                       {"fitted_slope", rep.flux.fitted_slope},
                       {"predicted_slope", rep.flux.predicted_slope},
                       {"decreasing", rep.flux.decreasing},
                       {"tolerance", rep.flux.slope_tolerance},
                       {"pass", rep.flux.pass}};
  json weak = json::array();
  for (const auto& e : rep.weak.entries) {
    json levels = json::array();
    for (const auto& l : e.levels) {
      levels.push_back({{"level", l.level},
                        {"residual", l.residual},
                        {"scale", l.scale},
                        {"delta", l.delta},
                        {"strip", l.strip},
                        {"boundary", l.boundary},
                        {"shock", l.shock},
                        {"identity_gap", l.identity_gap}});
    }
    weak.push_back({{"psi", e.psi},
                    {"form", e.form == WeakForm::Mass ? "mass" : "momentum"},
                    {"levels", levels},
                    {"monotone", e.monotone},
                    {"final_relative", e.final_relative},
                    {"tolerance", e.tolerance},
                    {"rh_bound", e.rh_bound},
                    {"pass", e.pass}});
  }
  j["weak_residuals"] = {{"entries", weak},
                         {"floor", rep.weak.floor},
                         {"tolerance", rep.weak.tolerance},
                         {"pass", rep.weak.pass}};
  return j.dump(2);
}

std::string error_json(ErrorKind kind, std::string_view message, int exit_code) {
  json j{{"schema", kErrorSchema},
         {"error", to_string(kind)},
         {"message", message},
         {"exit_code", exit_code}};
  return j.dump(2);
}

}  // namespace isofocus::io
