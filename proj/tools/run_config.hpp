#pragma once

#include <optional>
#include <string>

#include "isofocus/velocity.hpp"

namespace isofocus::cli {

struct RunConfig {
  int m = 2;
  double beta = -1.0;
  double a = 1.0;
  ConstructionOptions options;
  std::string out = ".";
};

/// Values given explicitly on the command line; unset fields keep the
/// value from the config file or the default.
struct Overrides {
  std::optional<int> m;
  std::optional<double> beta;
  std::optional<double> a;
  std::optional<double> omega0;
  std::optional<double> tol;
  std::optional<std::string> out;
  std::optional<double> perturb_omega_plus;
};

/// Flat JSON object. Keys: m, beta, a, omega0, tol, ode_rtol, ode_atol,
/// root_tol, quad_tol, xi_min_factor, xi_max_factor, x0_rel,
/// perturb_omega_plus, out. Throws InvalidParams on unknown keys or bad types.
RunConfig parse_config(const std::string& json_text, RunConfig base = {});

/// Applies the overrides; --tol sets ode_rtol and ode_atol = tol / 100.
RunConfig merge(RunConfig cfg, const Overrides& o);

/// Exit codes: 0 pass, 1 verification failure, 2 invalid input, 3 construction failure.
int exit_code_for(ErrorKind kind) noexcept;

}  // namespace isofocus::cli
