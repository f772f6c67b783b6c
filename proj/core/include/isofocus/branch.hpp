#pragma once

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isofocus/error.hpp"
#include "isofocus/ode.hpp"
#include "isofocus/params.hpp"

namespace isofocus {

/// Piecewise dense interpolant over a contiguous interval, built from the
/// accepted steps of an integration (in either direction).
template <std::size_t N>
class DenseCurve {
 public:
  DenseCurve() = default;

  explicit DenseCurve(std::vector<ode::DenseSegment<N>> segments) : segs_(std::move(segments)) {
    std::sort(segs_.begin(), segs_.end(),
              [](const auto& a, const auto& b) { return a.lo() < b.lo(); });
    lows_.reserve(segs_.size());
    for (const auto& s : segs_) lows_.push_back(s.lo());
  }

  bool empty() const { return segs_.empty(); }
  double lo() const { return segs_.front().lo(); }
  double hi() const { return segs_.back().hi(); }
  bool contains(double x) const { return !segs_.empty() && x >= lo() && x <= hi(); }

  ode::Vec<N> value(double x) const { return find(x).value(x); }
  ode::Vec<N> derivative(double x) const { return find(x).derivative(x); }

  const std::vector<ode::DenseSegment<N>>& segments() const { return segs_; }

 private:
  const ode::DenseSegment<N>& find(double x) const {
    if (!contains(x)) {
      throw Error(ErrorKind::DomainError,
                  "dense curve evaluated outside [" + std::to_string(lo()) + ", " +
                      std::to_string(hi()) + "] at " + std::to_string(x));
    }
    auto it = std::upper_bound(lows_.begin(), lows_.end(), x);
    const std::size_t idx = it == lows_.begin() ? 0 : static_cast<std::size_t>(it - lows_.begin()) - 1;
    return segs_[idx];
  }

  std::vector<ode::DenseSegment<N>> segs_;
  std::vector<double> lows_;
};

/// Large-|xi| model U(xi) = U* + c1/xi + c2/xi^2 + c3/xi^3, valid beyond
/// `edge` on the side given by `below`.
struct VelocityTail {
  double edge = 0.0;
  bool below = true;
  double u_star = 0.0;
  std::array<double, 3> c{};

  bool covers(double xi) const { return below ? xi < edge : xi > edge; }
  double value(double xi) const {
    const double z = 1.0 / xi;
    return u_star + z * (c[0] + z * (c[1] + z * c[2]));
  }
  double slope(double xi) const {
    const double z = 1.0 / xi;
    return -z * z * (c[0] + z * (2.0 * c[1] + z * 3.0 * c[2]));
  }
};

/// Series coefficients of the velocity tail for a given U*.
VelocityTail velocity_tail(const SimilarityParams& params, double u_star, double edge, bool below);

/// Analytic coefficients (A, B) of F(xi) - beta/xi = A/xi^2 + B/xi^3 + ...
/// where F = d ln|Omega| / dxi along a solution tending to U*.
std::array<double, 2> log_amplitude_tail(const SimilarityParams& params, double u_star);

struct BranchSample {
  double xi;
  double U;
  double dU;
  double L;  ///< running integral of d ln|Omega|/dxi from the branch anchor
};

/// One solution branch of the velocity ODE, carried together with the
/// log-amplitude integral L(xi) = int F so that density branches are exact
/// rescalings of it.
class Branch {
 public:
  Branch() = default;
  Branch(std::string name, SimilarityParams params, DenseCurve<2> curve,
         std::vector<BranchSample> samples, std::optional<VelocityTail> tail = std::nullopt);

  std::string_view name() const { return name_; }
  const SimilarityParams& params() const { return *params_; }

  /// Extent of the integrated part.
  double lo() const { return curve_.lo(); }
  double hi() const { return curve_.hi(); }
  /// Extent including the asymptotic tail (may be infinite).
  double domain_lo() const;
  double domain_hi() const;
  bool contains(double xi) const { return xi >= domain_lo() && xi <= domain_hi(); }

  double U(double xi) const;
  double dU(double xi) const;
  /// Log-amplitude integral; only defined on the integrated part.
  double L(double xi) const;

  const std::vector<BranchSample>& samples() const { return samples_; }
  const std::optional<VelocityTail>& tail() const { return tail_; }
  const DenseCurve<2>& curve() const { return curve_; }

  /// Points (e.g. critical points) where the ODE right-hand side is 0/0; the
  /// slope there is taken from the interpolant.
  void add_special_point(double xi, double radius) { specials_.push_back({xi, radius}); }

  /// max over segment midpoints of |p'(xi) - f(xi, p(xi))| / (1 + |f|).
  double max_midpoint_residual() const;
  /// Same, restricted to segments whose midpoint lies in [lo, hi].
  double max_midpoint_residual(double lo, double hi) const;

 private:
  struct Special {
    double xi;
    double radius;
  };

  std::string name_;
  std::optional<SimilarityParams> params_;
  DenseCurve<2> curve_;
  std::vector<BranchSample> samples_;
  std::optional<VelocityTail> tail_;
  std::vector<Special> specials_;
};

/// Builds samples (ascending xi) from an integration result whose state is (U, L).
std::vector<BranchSample> samples_from(const ode::Result<2>& res);

}  // namespace isofocus
