#pragma once

// Adaptive Dormand-Prince 5(4) integrator with the 4th-order continuous
// extension of Hairer & Wanner (DOPRI5). Works in either direction of the
// independent variable and records one dense segment per accepted step.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace isofocus::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

/// Polynomial piece on [x0, x0 + h] (h may be negative), stored in monomial
/// form y(x0 + theta h) = sum_k c[k] theta^k, degree <= 5.
template <std::size_t N>
struct DenseSegment {
  double x0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 6> c{};

  double x_begin() const { return x0; }
  double x_end() const { return x0 + h; }
  double lo() const { return std::min(x0, x0 + h); }
  double hi() const { return std::max(x0, x0 + h); }

  Vec<N> value(double x) const {
    const double th = (x - x0) / h;
    Vec<N> y{};
    for (std::size_t i = 0; i < N; ++i) {
      double acc = c[5][i];
      for (int k = 4; k >= 0; --k) acc = acc * th + c[k][i];
      y[i] = acc;
    }
    return y;
  }

  /// Derivative with respect to x.
  Vec<N> derivative(double x) const {
    const double th = (x - x0) / h;
    Vec<N> d{};
    for (std::size_t i = 0; i < N; ++i) {
      double acc = 5.0 * c[5][i];
      for (int k = 4; k >= 1; --k) acc = acc * th + k * c[k][i];
      d[i] = acc / h;
    }
    return d;
  }
};

/// DOPRI5 continuous extension given in the Hairer-Wanner r-form
/// y = r1 + th (r2 + (1-th)(r3 + th (r4 + (1-th) r5))).
template <std::size_t N>
DenseSegment<N> from_dopri_form(double x0, double h, const std::array<Vec<N>, 5>& r) {
  DenseSegment<N> s;
  s.x0 = x0;
  s.h = h;
  for (std::size_t i = 0; i < N; ++i) {
    s.c[0][i] = r[0][i];
    s.c[1][i] = r[1][i] + r[2][i];
    s.c[2][i] = r[3][i] + r[4][i] - r[2][i];
    s.c[3][i] = -(r[3][i] + 2.0 * r[4][i]);
    s.c[4][i] = r[4][i];
    s.c[5][i] = 0.0;
  }
  return s;
}

/// Cubic Hermite segment between two states with known slopes.
template <std::size_t N>
DenseSegment<N> hermite_segment(double x0, const Vec<N>& y0, const Vec<N>& f0,
                                double x1, const Vec<N>& y1, const Vec<N>& f1) {
  DenseSegment<N> s;
  s.x0 = x0;
  s.h = x1 - x0;
  for (std::size_t i = 0; i < N; ++i) {
    const double d0 = s.h * f0[i], d1 = s.h * f1[i], dy = y1[i] - y0[i];
    s.c[0][i] = y0[i];
    s.c[1][i] = d0;
    s.c[2][i] = 3.0 * dy - 2.0 * d0 - d1;
    s.c[3][i] = -2.0 * dy + d0 + d1;
  }
  return s;
}

/// Quintic Hermite segment matching value, slope and second derivative at
/// both ends.
template <std::size_t N>
DenseSegment<N> quintic_hermite_segment(double x0, const Vec<N>& y0, const Vec<N>& f0,
                                        const Vec<N>& s0, double x1, const Vec<N>& y1,
                                        const Vec<N>& f1, const Vec<N>& s1) {
  DenseSegment<N> s;
  s.x0 = x0;
  s.h = x1 - x0;
  const double h2 = s.h * s.h;
  for (std::size_t i = 0; i < N; ++i) {
    const double d0 = s.h * f0[i], q0 = h2 * s0[i];
    const double d1 = s.h * f1[i], q1 = h2 * s1[i];
    const double D = y1[i] - y0[i] - d0 - 0.5 * q0;
    const double E = d1 - d0 - q0;
    const double G = q1 - q0;
    s.c[0][i] = y0[i];
    s.c[1][i] = d0;
    s.c[2][i] = 0.5 * q0;
    s.c[3][i] = 10.0 * D - 4.0 * E + 0.5 * G;
    s.c[4][i] = -15.0 * D + 7.0 * E - G;
    s.c[5][i] = 6.0 * D - 3.0 * E + 0.5 * G;
  }
  return s;
}

/// The polynomial of `seg` re-expressed on [xa, xb] (exact up to rounding).
template <std::size_t N>
DenseSegment<N> restrict_segment(const DenseSegment<N>& seg, double xa, double xb) {
  DenseSegment<N> s;
  s.x0 = xa;
  s.h = xb - xa;
  // theta_old = t0 + k phi
  const double t0 = (xa - seg.x0) / seg.h;
  const double k = s.h / seg.h;
  for (std::size_t i = 0; i < N; ++i) {
    // Horner composition of the degree-5 polynomial with t0 + k phi.
    std::array<double, 6> acc{};
    acc[0] = seg.c[5][i];
    for (int d = 4; d >= 0; --d) {
      std::array<double, 6> next{};
      for (int j = 0; j < 5; ++j) {
        next[j] += acc[j] * t0;
        next[j + 1] += acc[j] * k;
      }
      next[0] += seg.c[d][i];
      acc = next;
    }
    for (int j = 0; j < 6; ++j) s.c[j][i] = acc[j];
  }
  return s;
}

struct Options {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h_init = 0.0;  ///< 0 selects an automatic initial step
  double h_max = std::numeric_limits<double>::infinity();
  double h_min = 1e-15;  ///< relative to max(1, |x|)
  std::size_t max_steps = 5'000'000;
};

enum class Stop {
  Reached,        ///< integrated to x_end
  Event,          ///< event function changed sign inside a step
  Guard,          ///< right-hand side refused every step down to h_min
  MaxSteps,
};

template <std::size_t N>
struct Result {
  std::vector<double> x;
  std::vector<Vec<N>> y;
  std::vector<Vec<N>> dy;
  std::vector<DenseSegment<N>> segments;
  Stop stop = Stop::Reached;
  std::size_t accepted = 0;
  std::size_t rejected = 0;

  double x_last() const { return x.back(); }
  const Vec<N>& y_last() const { return y.back(); }
};

/// Event function that never fires.
struct NoEvent {
  template <class Y>
  double operator()(double, const Y&) const { return 1.0; }
};

/// Integrates y' = f(x, y) from x0 to x1.
///
/// `rhs(x, y, dy)` returns false when the state is inadmissible (e.g. across
/// a singular line); the step is then rejected and shrunk. `event(x, y)` is
/// sampled at accepted steps; the first sign change is located on the dense
/// output by bisection and integration stops there.
template <std::size_t N, class Rhs, class Event = NoEvent>
Result<N> integrate(Rhs&& rhs, double x0, const Vec<N>& y0, double x1, const Options& opt,
                    Event&& event = Event{}) {
  // Dormand-Prince coefficients.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  Result<N> res;
  const double dir = x1 >= x0 ? 1.0 : -1.0;
  double x = x0;
  Vec<N> y = y0;
  Vec<N> k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, yt{}, ynew{};

  auto finite = [](const Vec<N>& v) {
    for (double e : v) {
      if (!std::isfinite(e)) return false;
    }
    return true;
  };
  auto eval = [&](double xx, const Vec<N>& yy, Vec<N>& out) {
    return rhs(xx, yy, out) && finite(out);
  };

  res.x.push_back(x);
  res.y.push_back(y);
  if (!eval(x, y, k1)) {
    res.stop = Stop::Guard;
    res.dy.push_back(k1);
    return res;
  }
  res.dy.push_back(k1);
  if (x0 == x1) return res;

  const double span = std::abs(x1 - x0);
  double h = opt.h_init;
  if (h <= 0.0) {
    double ny = 0.0, nf = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y[i]);
      ny += (y[i] / sc) * (y[i] / sc);
      nf += (k1[i] / sc) * (k1[i] / sc);
    }
    ny = std::sqrt(ny / N);
    nf = std::sqrt(nf / N);
    h = (ny < 1e-5 || nf < 1e-5) ? 1e-6 : 0.01 * ny / nf;
    h = std::min({h, span, opt.h_max});
  }
  h = std::min(h, opt.h_max);

  const double ev_sign0 = event(x, y);

  while (true) {
    if (res.accepted + res.rejected >= opt.max_steps) {
      res.stop = Stop::MaxSteps;
      return res;
    }
    const double remaining = std::abs(x1 - x);
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    const double hmin = opt.h_min * std::max(1.0, std::abs(x));
    if (h < hmin) {
      res.stop = last ? Stop::Reached : Stop::Guard;
      return res;
    }
    const double hs = dir * h;

    bool ok = true;
    for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * a21 * k1[i];
    ok = ok && eval(x + c2 * hs, yt, k2);
    if (ok) {
      for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
      ok = eval(x + c3 * hs, yt, k3);
    }
    if (ok) {
      for (std::size_t i = 0; i < N; ++i)
        yt[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
      ok = eval(x + c4 * hs, yt, k4);
    }
    if (ok) {
      for (std::size_t i = 0; i < N; ++i)
        yt[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      ok = eval(x + c5 * hs, yt, k5);
    }
    if (ok) {
      for (std::size_t i = 0; i < N; ++i)
        yt[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                             a65 * k5[i]);
      ok = eval(x + hs, yt, k6);
    }
    if (ok) {
      for (std::size_t i = 0; i < N; ++i)
        ynew[i] = y[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] +
                               a76 * k6[i]);
      ok = eval(x + hs, ynew, k7);
    }
    if (!ok) {
      ++res.rejected;
      h *= 0.25;
      continue;
    }

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]) / sc;
      err += ei * ei;
    }
    err = std::sqrt(err / N);

    if (err > 1.0) {
      ++res.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }

    std::array<Vec<N>, 5> rf{};
    for (std::size_t i = 0; i < N; ++i) {
      rf[0][i] = y[i];
      rf[1][i] = ynew[i] - y[i];
      rf[2][i] = hs * k1[i] - rf[1][i];
      rf[3][i] = rf[1][i] - hs * k7[i] - rf[2][i];
      rf[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                       d7 * k7[i]);
    }
    const DenseSegment<N> seg = from_dopri_form<N>(x, hs, rf);

    const double xnew = last ? x1 : x + hs;
    const double ev_new = event(xnew, ynew);
    const bool fired = (ev_sign0 < 0.0) != (ev_new < 0.0);
    if (fired) {
      // Bisection on the dense output for the sign change.
      double lo = x, hi = xnew;
      for (int it = 0; it < 200 && std::abs(hi - lo) > 4e-16 * std::max(1.0, std::abs(hi));
           ++it) {
        const double mid = 0.5 * (lo + hi);
        const double em = event(mid, seg.value(mid));
        if ((em < 0.0) == (ev_sign0 < 0.0)) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double xe = lo;
      Vec<N> ye = seg.value(xe);
      Vec<N> fe{};
      if (!eval(xe, ye, fe)) fe = seg.derivative(xe);
      if (xe != x) {
        res.segments.push_back(restrict_segment(seg, x, xe));
        res.x.push_back(xe);
        res.y.push_back(ye);
        res.dy.push_back(fe);
      }
      ++res.accepted;
      res.stop = Stop::Event;
      return res;
    }
    res.segments.push_back(seg);
    x = xnew;
    y = ynew;
    k1 = k7;
    res.x.push_back(x);
    res.y.push_back(y);
    res.dy.push_back(k1);
    ++res.accepted;
    if (last) {
      res.stop = Stop::Reached;
      return res;
    }

    const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
    h = std::min(h * fac, opt.h_max);
  }
}

}  // namespace isofocus::ode
