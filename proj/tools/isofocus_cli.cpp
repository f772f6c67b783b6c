// isofocus: construct, evaluate and verify the isothermal focusing solution.

#include <CLI11.hpp>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "isofocus/io.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace isofocus;

namespace {

struct Common {
  cli::Overrides ov;
  std::string config_path;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option_function<int>("--m", [&c](int v) { c.ov.m = v; }, "m = n - 1 (1 or 2)");
  sub->add_option_function<double>("--beta", [&c](double v) { c.ov.beta = v; }, "similarity exponent in (-m, 0)");
  sub->add_option_function<double>("--a", [&c](double v) { c.ov.a = v; }, "sound speed");
  sub->add_option_function<double>("--omega0", [&c](double v) { c.ov.omega0 = v; }, "density amplitude at xi = 0-");
  sub->add_option_function<double>("--tol", [&c](double v) { c.ov.tol = v; }, "ODE relative tolerance");
  sub->add_option_function<std::string>("--out", [&c](const std::string& v) { c.ov.out = v; }, "output directory");
  sub->add_option("--config", c.config_path, "flat JSON config; flags override it");
  sub->add_option_function<double>("--perturb-omega-plus", [&c](double v) { c.ov.perturb_omega_plus = v; },
                                   "scale Omega_+ by (1 + value) after the jump (fault injection)");
}

cli::RunConfig resolve(const Common& c) {
  cli::RunConfig cfg;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw Error(ErrorKind::IoError, "cannot read config '" + c.config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = cli::parse_config(ss.str());
  }
  cfg = cli::merge(cfg, c.ov);
  validate(cfg.options);
  return cfg;
}

SimilarityParams params_of(const cli::RunConfig& cfg) {
  return SimilarityParams::make(cfg.m, cfg.beta, cfg.a);
}

fs::path out_dir(const cli::RunConfig& cfg) {
  fs::path p(cfg.out);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create output directory '" + cfg.out + "'");
  return p;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw Error(ErrorKind::IoError, "cannot write '" + p.string() + "'");
  return os;
}

int cmd_inspect(const cli::RunConfig& cfg) {
  const auto p = params_of(cfg);
  const auto cp = critical_points(p);
  std::cout << std::setprecision(15);
  std::cout << "m " << p.m() << "  beta " << p.beta() << "  a " << p.a() << "  mu " << p.mu() << "\n"
            << "xi_w          " << cp.xi_w << "\n"
            << "U_w           " << cp.U_w << "\n"
            << "lambda_plus   " << cp.lambda_plus << "\n"
            << "lambda_minus  " << cp.lambda_minus << "\n"
            << "radicand      " << cp.radicand << "\n"
            << "dir_plus      (" << cp.dir_plus[0] << ", " << cp.dir_plus[1] << ")\n"
            << "dir_minus     (" << cp.dir_minus[0] << ", " << cp.dir_minus[1] << ")\n"
            << "ustar_bound   " << ustar_bound(p) << "\n";
  return 0;
}

struct SweepRow {
  double beta = 0.0;
  double bound = std::numeric_limits<double>::quiet_NaN();
  double u_star = std::numeric_limits<double>::quiet_NaN();
  bool admissible = false;
  std::string status = "ok";
};

int cmd_sweep(const cli::RunConfig& cfg, double beta_lo, double beta_hi, int steps, unsigned workers) {
  if (steps < 1) throw Error(ErrorKind::InvalidParams, "sweep needs --steps >= 1");
  const double m = cfg.m;
  if (!(beta_lo > -m && beta_hi < 0.0 && beta_lo <= beta_hi)) {
    std::ostringstream os;
    os << "β out of (−m,0): sweep grid [" << beta_lo << ", " << beta_hi << "] for m=" << cfg.m;
    throw Error(ErrorKind::InvalidParams, os.str());
  }
  std::vector<SweepRow> rows(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    rows[static_cast<std::size_t>(i)].beta =
        steps == 1 ? beta_lo : beta_lo + (beta_hi - beta_lo) * i / (steps - 1);
  }
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& r = rows[i];
      try {
        const auto p = SimilarityParams::make(cfg.m, r.beta, cfg.a);
        r.bound = ustar_bound(p);
        const KinkBuild k = build_kink(p, cfg.options);
        r.u_star = k.u_star;
        r.admissible = k.u_star < 0.0;
      } catch (const Error& e) {
        r.status = std::string(to_string(e.kind()));
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<unsigned>(workers, static_cast<unsigned>(rows.size())); ++w) {
    pool.emplace_back(work);
  }
  for (auto& t : pool) t.join();

  const fs::path dir = out_dir(cfg);
  auto os = open_out(dir / "sweep.csv");
  os << std::setprecision(17) << "beta,ustar_bound,u_star,bound_nonpositive,admissible,status\n";
  for (const auto& r : rows) {
    os << r.beta << ',' << r.bound << ',' << r.u_star << ',' << (r.bound <= 0.0 ? 1 : 0) << ','
       << (r.admissible ? 1 : 0) << ',' << r.status << '\n';
  }
  std::cout << "wrote " << (dir / "sweep.csv").string() << " (" << rows.size() << " rows)\n";
  return 0;
}

void write_construct(const SimilaritySolution& sol, const fs::path& dir) {
  {
    auto os = open_out(dir / "profile.csv");
    io::write_profile_csv(os, sol, io::default_xi_grid(sol, 2001));
  }
  const auto& v = sol.velocity();
  for (const auto& [name, b] : {std::pair<const char*, const Branch*>{"hat", &v.hat()},
                                {"kink", &v.kink()},
                                {"tilde", &v.tilde()}}) {
    auto os = open_out(dir / (std::string("branch_") + name + ".csv"));
    io::write_branch_csv(os, *b);
  }
  auto os = open_out(dir / "manifest.json");
  os << io::manifest_json(sol) << "\n";
}

int cmd_construct(const cli::RunConfig& cfg) {
  const auto sol = SimilaritySolution::build(params_of(cfg), cfg.options);
  const fs::path dir = out_dir(cfg);
  write_construct(sol, dir);
  const auto& v = sol.velocity();
  std::cout << std::setprecision(12) << "U*      " << v.u_star() << "\n"
            << "xi*     " << v.xi_star() << "\n"
            << "xi_s    " << v.xi_s() << "\n"
            << "C-      " << sol.density().C_minus() << "\n"
            << "Omega0' " << sol.density().Omega0_prime() << "\n"
            << "wrote " << dir.string() << "/{profile,branch_hat,branch_kink,branch_tilde}.csv, manifest.json\n";
  return 0;
}

SimilaritySolution load_or_build(const cli::RunConfig& cfg, const std::string& manifest) {
  if (manifest.empty()) return SimilaritySolution::build(params_of(cfg), cfg.options);
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorKind::IoError, "cannot read manifest '" + manifest + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return io::rebuild(io::parse_manifest(ss.str()));
}

int cmd_eval(const cli::RunConfig& cfg, const std::string& manifest, const std::vector<double>& times,
             double r_lo, double r_hi, int points) {
  if (!(r_lo > 0.0 && r_hi > r_lo) || points < 2) {
    throw Error(ErrorKind::InvalidParams, "eval needs 0 < r-min < r-max and points >= 2");
  }
  const auto sol = load_or_build(cfg, manifest);
  const fs::path dir = out_dir(cfg);
  std::vector<double> r;
  for (int i = 0; i < points; ++i) r.push_back(r_lo + (r_hi - r_lo) * i / (points - 1));
  for (std::size_t k = 0; k < times.size(); ++k) {
    const fs::path f = dir / ("field_" + std::to_string(k) + ".csv");
    auto os = open_out(f);
    io::write_field_csv(os, sol, times[k], r);
    std::cout << "wrote " << f.string() << " (t=" << times[k] << ")\n";
  }
  return 0;
}

void print_checks(const VerificationReport& rep) {
  std::cout << std::left << std::setw(34) << "check" << std::setw(14) << "value" << std::setw(12)
            << "tolerance" << "result\n";
  for (const auto& c : rep.checks) {
    std::ostringstream v, t;
    v << std::setprecision(4) << c.value;
    t << std::setprecision(3) << c.tolerance;
    std::cout << std::setw(34) << c.name << std::setw(14) << v.str() << std::setw(12) << t.str()
              << (c.pass ? "PASS" : "FAIL") << "\n";
  }
  std::cout << (rep.pass ? "all checks passed\n" : "verification FAILED\n");
}

int cmd_verify(const cli::RunConfig& cfg, const std::string& manifest, int level_max, bool weak) {
  const auto sol = load_or_build(cfg, manifest);
  VerifyOptions vo;
  vo.weak_level_max = level_max;
  vo.weak_level_min = std::min(vo.weak_level_min, level_max);
  vo.run_weak = weak;
  const auto rep = verify(sol, vo);
  const fs::path dir = out_dir(cfg);
  auto os = open_out(dir / "report.json");
  os << io::report_json(rep) << "\n";
  print_checks(rep);
  return rep.pass ? 0 : 1;
}

int cmd_trace(const cli::RunConfig& cfg, const std::string& kind, double t0, double r0, double t1) {
  const TraceKind k = trace_kind_from_string(kind);
  const auto sol = SimilaritySolution::build(params_of(cfg), cfg.options);
  const auto tr = sol.trace(k, t0, r0, t1);
  const fs::path dir = out_dir(cfg);
  {
    auto os = open_out(dir / "trace.csv");
    io::write_trace_csv(os, tr);
  }
  auto os = open_out(dir / "trace_events.csv");
  io::write_trace_events_csv(os, tr);
  std::cout << to_string(tr.kind) << ": " << tr.nodes.size() << " nodes, " << tr.events.size()
            << " events, " << to_string(tr.termination) << "\n";
  return 0;
}

int cmd_fv(const cli::RunConfig& cfg, const std::vector<int>& cells, double exclusion) {
  const auto sol = SimilaritySolution::build(params_of(cfg), cfg.options);
  const auto conv = run_convergence(sol, cells, exclusion);
  const fs::path dir = out_dir(cfg);
  {
    auto os = open_out(dir / "fv_convergence.csv");
    io::write_fv_convergence_csv(os, conv);
  }
  const FVConfig fc = FVConfig::defaults(sol, cells.back());
  const FVState s = advance(init_from_similarity(sol, fc), fc, sol);
  auto os = open_out(dir / "fv_snapshot.csv");
  io::write_fv_snapshot_csv(os, s, sol);
  std::cout << std::setprecision(4);
  for (const auto& r : conv.rows) {
    std::cout << "N=" << r.cells << "  L1(q0)=" << r.error.l1_q0 << "  L1(q1)=" << r.error.l1_q1
              << "  rate=" << r.rate_q0 << "/" << r.rate_q1 << "  front " << r.front.cells_off
              << " cells\n";
  }
  std::cout << (conv.pass ? "fv cross-check passed\n" : "fv cross-check FAILED\n");
  return conv.pass ? 0 : 1;
}

void report_error(ErrorKind kind, const std::string& msg, int code, const std::string& out) {
  const std::string j = io::error_json(kind, msg, code);
  std::cerr << j << "\n";
  if (!out.empty()) {
    std::error_code ec;
    fs::create_directories(out, ec);
    std::ofstream os(fs::path(out) / "error.json");
    if (os) os << j << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isothermal focusing similarity solution"};
  app.require_subcommand(1);
  Common c;

  auto* inspect = app.add_subcommand("inspect", "critical-point report");
  add_common(inspect, c);

  auto* sweep = app.add_subcommand("sweep", "U* and its bound over a beta grid");
  add_common(sweep, c);
  double beta_lo = -1.9, beta_hi = -0.1;
  int steps = 19;
  unsigned workers = 0;
  sweep->add_option("--beta-min", beta_lo, "first beta");
  sweep->add_option("--beta-max", beta_hi, "last beta");
  sweep->add_option("--steps", steps, "grid points");
  sweep->add_option("--workers", workers, "worker threads (0: hardware)");

  auto* construct = app.add_subcommand("construct", "profiles and manifest");
  add_common(construct, c);

  std::string manifest;
  auto* eval = app.add_subcommand("eval", "field slices rho(t, r), u(t, r)");
  add_common(eval, c);
  std::vector<double> times{-0.5, 0.0, 0.5};
  double r_lo = 1e-3, r_hi = 2.0;
  int points = 400;
  eval->add_option("--manifest", manifest, "rebuild from a manifest instead of flags");
  eval->add_option("--t", times, "times")->delimiter(',');
  eval->add_option("--r-min", r_lo, "smallest radius");
  eval->add_option("--r-max", r_hi, "largest radius");
  eval->add_option("--points", points, "radii per slice");

  auto* ver = app.add_subcommand("verify", "weak-solution checks; exit 1 on failure");
  add_common(ver, c);
  int level_max = 6;
  bool no_weak = false;
  ver->add_option("--manifest", manifest, "rebuild from a manifest instead of flags");
  ver->add_option("--levels", level_max, "finest weak-form refinement level");
  ver->add_flag("--no-weak", no_weak, "skip the weak-form battery");

  auto* trace = app.add_subcommand("trace", "particle path or characteristic");
  add_common(trace, c);
  std::string kind = "particle";
  double t0 = -1.0, r0 = 0.5, t1 = 1.0;
  trace->add_option("--kind", kind, "particle | plus | minus");
  trace->add_option("--t0", t0, "start time");
  trace->add_option("--r0", r0, "start radius");
  trace->add_option("--t1", t1, "end time");

  auto* fv = app.add_subcommand("fv", "finite-volume convergence study");
  add_common(fv, c);
  std::vector<int> cells{64, 128, 256, 512};
  double exclusion = 0.15;
  fv->add_option("--cells", cells, "cell counts")->delimiter(',');
  fv->add_option("--exclusion", exclusion, "half-width of the band around the shock left out of L1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::string out_hint;
  try {
    const cli::RunConfig cfg = resolve(c);
    if (cfg.out != ".") out_hint = cfg.out;
    if (inspect->parsed()) return cmd_inspect(cfg);
    if (sweep->parsed()) return cmd_sweep(cfg, beta_lo, beta_hi, steps, workers);
    if (construct->parsed()) return cmd_construct(cfg);
    if (eval->parsed()) return cmd_eval(cfg, manifest, times, r_lo, r_hi, points);
    if (ver->parsed()) return cmd_verify(cfg, manifest, level_max, !no_weak);
    if (trace->parsed()) return cmd_trace(cfg, kind, t0, r0, t1);
    if (fv->parsed()) {
      if (cells.size() < 2) throw Error(ErrorKind::InvalidParams, "fv needs at least two cell counts");
      return cmd_fv(cfg, cells, exclusion);
    }
  } catch (const Error& e) {
    const int code = cli::exit_code_for(e.kind());
    report_error(e.kind(), e.what(), code, out_hint);
    return code;
  } catch (const std::exception& e) {
    report_error(ErrorKind::IntegrationFailure, e.what(), 3, out_hint);
    return 3;
  }
  return 2;
}
