#pragma once

#include <array>

namespace isofocus {

/// Problem parameters for a radial isothermal similarity flow.
///
/// `m` is the geometric index (n - 1), `beta` the similarity exponent of
/// the density, `a` the constant sound speed. Only m = 1, 2 with
/// -m < beta < 0 are accepted; construction throws
/// Error(ErrorKind::InvalidParams) naming the violated bound otherwise.
class SimilarityParams {
 public:
  static SimilarityParams make(int m, double beta, double a = 1.0);

  int m() const noexcept { return m_; }
  int n() const noexcept { return m_ + 1; }
  double beta() const noexcept { return beta_; }
  double a() const noexcept { return a_; }
  double mu() const noexcept { return beta_ / m_; }

  friend bool operator==(const SimilarityParams&, const SimilarityParams&) = default;

 private:
  SimilarityParams(int m, double beta, double a) : m_(m), beta_(beta), a_(a) {}

  int m_;
  double beta_;
  double a_;
};

/// Data of the off-origin critical point P_w = l+ ∩ ω and its linearization.
struct CriticalPointData {
  double xi_w;
  double U_w;
  double lambda_plus;
  double lambda_minus;
  double radicand;
  /// Departure directions (1, 1 - lambda), not normalized.
  std::array<double, 2> dir_plus;
  std::array<double, 2> dir_minus;
};

CriticalPointData critical_points(const SimilarityParams& params);

/// Closed-form upper bound for U* = U_k(-inf) obtained by integrating the
/// kink inequality from -inf to xi_w.
double ustar_bound(const SimilarityParams& params);

}  // namespace isofocus
