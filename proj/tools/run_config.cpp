#include "run_config.hpp"

#include <nlohmann/json.hpp>

#include "isofocus/error.hpp"

namespace isofocus::cli {

namespace {

double number(const nlohmann::json& v, const std::string& key) {
  if (!v.is_number()) throw Error(ErrorKind::InvalidParams, "config key '" + key + "' must be a number");
  return v.get<double>();
}

}  // namespace

RunConfig parse_config(const std::string& json_text, RunConfig cfg) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidParams, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::InvalidParams, "config must be a flat JSON object");
  auto& o = cfg.options;
  for (const auto& [key, v] : j.items()) {
    if (key == "m") {
      if (!v.is_number_integer()) throw Error(ErrorKind::InvalidParams, "config key 'm' must be an integer");
      cfg.m = v.get<int>();
    } else if (key == "beta") {
      cfg.beta = number(v, key);
    } else if (key == "a") {
      cfg.a = number(v, key);
    } else if (key == "omega0") {
      o.omega0 = number(v, key);
    } else if (key == "tol") {
      o.ode_rtol = number(v, key);
      o.ode_atol = o.ode_rtol * 1e-2;
    } else if (key == "ode_rtol") {
      o.ode_rtol = number(v, key);
    } else if (key == "ode_atol") {
      o.ode_atol = number(v, key);
    } else if (key == "root_tol") {
      o.root_tol = number(v, key);
    } else if (key == "quad_tol") {
      o.quad_tol = number(v, key);
    } else if (key == "xi_min_factor") {
      o.xi_min_factor = number(v, key);
    } else if (key == "xi_max_factor") {
      o.xi_max_factor = number(v, key);
    } else if (key == "x0_rel") {
      o.x0_rel = number(v, key);
    } else if (key == "perturb_omega_plus") {
      o.omega_plus_perturbation = number(v, key);
    } else if (key == "out") {
      if (!v.is_string()) throw Error(ErrorKind::InvalidParams, "config key 'out' must be a string");
      cfg.out = v.get<std::string>();
    } else {
      throw Error(ErrorKind::InvalidParams, "unknown config key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig merge(RunConfig cfg, const Overrides& o) {
  if (o.m) cfg.m = *o.m;
  if (o.beta) cfg.beta = *o.beta;
  if (o.a) cfg.a = *o.a;
  if (o.omega0) cfg.options.omega0 = *o.omega0;
  if (o.tol) {
    cfg.options.ode_rtol = *o.tol;
    cfg.options.ode_atol = *o.tol * 1e-2;
  }
  if (o.out) cfg.out = *o.out;
  if (o.perturb_omega_plus) cfg.options.omega_plus_perturbation = *o.perturb_omega_plus;
  return cfg;
}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidParams:
    case ErrorKind::DomainError:
    case ErrorKind::ClassViolation:
    case ErrorKind::IoError:
      return 2;
    default:
      return 3;
  }
}

}  // namespace isofocus::cli
