#include "isofocus/branch.hpp"

#include <cmath>

#include "isofocus/similarity_ode.hpp"

namespace isofocus {

VelocityTail velocity_tail(const SimilarityParams& params, double u_star, double edge, bool below) {
  const double a2 = params.a() * params.a();
  const double b = params.beta();
  const double m = params.m();
  const double S = u_star;
  VelocityTail t;
  t.edge = edge;
  t.below = below;
  t.u_star = u_star;
  t.c[0] = -a2 * b;
  t.c[1] = -0.5 * a2 * S * (2.0 * b + m);
  t.c[2] = a2 * (2.0 * a2 * b * b + a2 * b * m - a2 * b - S * S * (3.0 * b + 2.0 * m)) / 3.0;
  return t;
}

std::array<double, 2> log_amplitude_tail(const SimilarityParams& params, double u_star) {
  const double a2 = params.a() * params.a();
  const double b = params.beta();
  const double m = params.m();
  return {(m + b) * u_star, (m + b) * (u_star * u_star - a2 * b) + a2 * b};
}

Branch::Branch(std::string name, SimilarityParams params, DenseCurve<2> curve,
               std::vector<BranchSample> samples, std::optional<VelocityTail> tail)
    : name_(std::move(name)),
      params_(params),
      curve_(std::move(curve)),
      samples_(std::move(samples)),
      tail_(tail) {
  std::sort(samples_.begin(), samples_.end(),
            [](const BranchSample& a, const BranchSample& b) { return a.xi < b.xi; });
}

double Branch::domain_lo() const {
  if (tail_ && tail_->below) return -std::numeric_limits<double>::infinity();
  return curve_.lo();
}

double Branch::domain_hi() const {
  if (tail_ && !tail_->below) return std::numeric_limits<double>::infinity();
  return curve_.hi();
}

double Branch::U(double xi) const {
  if (tail_ && tail_->covers(xi) && !curve_.contains(xi)) return tail_->value(xi);
  return curve_.value(xi)[0];
}

double Branch::dU(double xi) const {
  if (tail_ && tail_->covers(xi) && !curve_.contains(xi)) return tail_->slope(xi);
  for (const auto& s : specials_) {
    if (std::abs(xi - s.xi) <= s.radius) return curve_.derivative(xi)[0];
  }
  const double u = curve_.value(xi)[0];
  const double f = velocity_slope_raw(xi, u, *params_);
  if (!std::isfinite(f)) return curve_.derivative(xi)[0];
  return f;
}

double Branch::L(double xi) const { return curve_.value(xi)[1]; }

double Branch::max_midpoint_residual() const {
  return max_midpoint_residual(-std::numeric_limits<double>::infinity(),
                               std::numeric_limits<double>::infinity());
}

double Branch::max_midpoint_residual(double lo, double hi) const {
  double worst = 0.0;
  for (const auto& seg : curve_.segments()) {
    const double xm = 0.5 * (seg.lo() + seg.hi());
    if (xm < lo || xm > hi) continue;
    bool special = false;
    for (const auto& s : specials_) {
      if (std::abs(xm - s.xi) <= s.radius) special = true;
    }
    if (special) continue;
    const double u = seg.value(xm)[0];
    const double f = velocity_slope_raw(xm, u, *params_);
    if (!std::isfinite(f)) continue;
    const double d = seg.derivative(xm)[0];
    worst = std::max(worst, std::abs(d - f) / (1.0 + std::abs(f)));
  }
  return worst;
}

std::vector<BranchSample> samples_from(const ode::Result<2>& res) {
  std::vector<BranchSample> out;
  out.reserve(res.x.size());
  for (std::size_t i = 0; i < res.x.size(); ++i) {
    out.push_back({res.x[i], res.y[i][0], res.dy[i][0], res.y[i][1]});
  }
  std::sort(out.begin(), out.end(),
            [](const BranchSample& a, const BranchSample& b) { return a.xi < b.xi; });
  return out;
}

}  // namespace isofocus
