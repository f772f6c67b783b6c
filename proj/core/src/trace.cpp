#include <cmath>

#include "isofocus/error.hpp"
#include "isofocus/flow_field.hpp"
#include "isofocus/ode.hpp"

namespace isofocus {

namespace {

constexpr double kOriginRadius = 1e-10;

}  // namespace

std::string_view to_string(TraceKind k) noexcept {
  switch (k) {
    case TraceKind::CharacteristicPlus: return "characteristic-plus";
    case TraceKind::CharacteristicMinus: return "characteristic-minus";
    case TraceKind::Particle: return "particle";
  }
  return "particle";
}

TraceKind trace_kind_from_string(std::string_view s) {
  if (s == "characteristic-plus" || s == "plus") return TraceKind::CharacteristicPlus;
  if (s == "characteristic-minus" || s == "minus") return TraceKind::CharacteristicMinus;
  if (s == "particle") return TraceKind::Particle;
  throw Error(ErrorKind::InvalidParams, "unknown trace kind '" + std::string(s) + "'");
}

std::string_view to_string(TraceEnd e) noexcept {
  switch (e) {
    case TraceEnd::ReachedTime: return "reached-time";
    case TraceEnd::ReachedOrigin: return "reached-origin";
    case TraceEnd::AbsorbedByShock: return "absorbed-by-shock";
  }
  return "reached-time";
}

PathTrace SimilaritySolution::trace(TraceKind kind, double t0, double r0, double t1) const {
  if (!(r0 > 0.0)) throw Error(ErrorKind::InvalidParams, "trace requires r0 > 0");
  if (!(t1 > t0)) throw Error(ErrorKind::InvalidParams, "trace integrates forward: t1 > t0");
  const double a = params().a();
  const double shift =
      kind == TraceKind::CharacteristicPlus ? a : kind == TraceKind::CharacteristicMinus ? -a : 0.0;
  const double xi_w = velocity_->xi_w();
  const double xi_s = velocity_->xi_s();

  PathTrace out;
  out.kind = kind;
  out.nodes.push_back({t0, r0});

  ode::Options o;
  o.rtol = 1e-10;
  o.atol = 1e-13;

  auto rhs = [&](double t, const ode::Vec<1>& y, ode::Vec<1>& dy) {
    if (!(y[0] > 0.0)) return false;
    dy[0] = evaluate(t, y[0]).u + shift;
    return true;
  };

  double t = t0;
  double r = r0;
  while (t < t1) {
    const bool before = t < 0.0;
    const double target = before && t1 > 0.0 ? 0.0 : t1;
    const double slope = before ? xi_w : xi_s;
    // Lines exist for t < 0 (kink) and t > 0 (shock); a start on the line
    // itself (the critical characteristic) does not count as a crossing.
    const double d0 = r - slope * t;
    const bool watch_line = std::abs(d0) > 1e-12 * std::max(1.0, r);
    auto event = [&](double tt, const ode::Vec<1>& y) {
      const double origin = y[0] - kOriginRadius;
      if (!watch_line) return origin;
      const double line = (y[0] - slope * tt) * (d0 > 0.0 ? 1.0 : -1.0);
      return std::min(origin, line);
    };
    auto res = ode::integrate<1>(rhs, t, ode::Vec<1>{r}, target, o, event);
    for (std::size_t i = 1; i < res.x.size(); ++i) out.nodes.push_back({res.x[i], res.y[i][0]});
    t = res.x_last();
    r = res.y_last()[0];

    if (res.stop == ode::Stop::Event) {
      if (!watch_line || std::abs(r - kOriginRadius) < std::abs(r - slope * t)) {
        out.termination = TraceEnd::ReachedOrigin;
        out.terminal_slope = res.dy.back()[0];
        return out;
      }
      const bool at_shock = !before;
      PathEvent ev{at_shock ? "shock" : "kink", t, r, 0.0};
      if (at_shock && kind == TraceKind::CharacteristicPlus) {
        ev.speed = res.dy.back()[0];
        out.events.push_back(ev);
        out.termination = TraceEnd::AbsorbedByShock;
        out.terminal_slope = ev.speed;
        return out;
      }
      // Step just across the line before restarting.
      const double line_r = slope * t;
      r = line_r - (d0 > 0.0 ? 1.0 : -1.0) * 1e-12 * std::max(1.0, line_r);
      if (!(r > 0.0)) {
        out.termination = TraceEnd::ReachedOrigin;
        out.terminal_slope = res.dy.back()[0];
        return out;
      }
      ev.speed = evaluate(t, r).u + shift;
      out.events.push_back(ev);
      continue;
    }
    if (res.stop != ode::Stop::Reached) {
      throw Error(ErrorKind::IntegrationFailure,
                  "trace integration failed at t=" + std::to_string(t));
    }
    if (t == 0.0 && before) {
      out.r_at_collapse = r;
      out.speed_at_collapse = velocity_->u_star() + shift;
      out.events.push_back({"collapse", 0.0, r, out.speed_at_collapse});
    }
  }
  out.terminal_slope = evaluate(t, r).u + shift;
  return out;
}

}  // namespace isofocus
