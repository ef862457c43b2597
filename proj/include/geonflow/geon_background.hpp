#pragma once

// Radial geometry of the Horowitz-Myers geon
//
//   g = ds^2 + (dphi/ds)^2 dxi^2 + phi^2 sum_i (dtheta^i)^2,   phi(s) = cosh^{2/n}(n s / 2),
//
// with xi in [0, 4 pi / n] and theta^i in [0, a_i]. All quantities are dimensionless
// (cosmological constant -n).

#include <cmath>
#include <concepts>
#include <numbers>
#include <vector>

#include <Eigen/Core>

#include "geonflow/errors.hpp"

namespace geonflow {

/// Dimension and torus periods of a geon. The xi-period is always 4 pi / n.
class GeonParams {
 public:
  GeonParams(int n, std::vector<double> periods);

  int n() const { return n_; }
  const std::vector<double>& periods() const { return periods_; }
  double xi_period() const { return 4.0 * std::numbers::pi / n_; }
  /// Coordinate volume of T^{n-1}: xi_period * prod a_i.
  double coordinate_area() const;

 private:
  int n_;
  std::vector<double> periods_;
};

/// Total mass m = -(4 pi / n) prod a_i. Always negative.
double mass(const GeonParams& params);

namespace detail {

template <std::floating_point Scalar>
Scalar log_cosh(Scalar x) {
  using std::abs, std::exp, std::log1p, std::log;
  const Scalar ax = abs(x);
  return ax + log1p(exp(Scalar(-2) * ax)) - log(Scalar(2));
}

template <std::floating_point Scalar>
void require_nonnegative(Scalar s) {
  if (!(s >= Scalar(0))) throw DomainError("radial coordinate s must be non-negative");
}

}  // namespace detail

/// phi(s) = cosh^{2/n}(n s / 2).
template <std::floating_point Scalar>
Scalar phi(Scalar s, int n) {
  detail::require_nonnegative(s);
  return std::exp(Scalar(2) / Scalar(n) * detail::log_cosh(Scalar(n) * s / Scalar(2)));
}

/// dphi/ds = phi tanh(n s / 2), which equals phi (1 - phi^{-n})^{1/2}.
template <std::floating_point Scalar>
Scalar dphi_ds(Scalar s, int n) {
  return phi(s, n) * std::tanh(Scalar(n) * s / Scalar(2));
}

/// Elementwise phi over a field of s-values. Negative entries are the caller's bug.
template <typename Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> phi(
    const Eigen::ArrayBase<Derived>& s, int n) {
  using Scalar = typename Derived::Scalar;
  const Scalar half_n = Scalar(n) / Scalar(2);
  const auto x = (half_n * s.derived()).abs().eval();
  const auto log_cosh = (x + (Scalar(-2) * x).exp().log1p() - std::log(Scalar(2))).eval();
  return (log_cosh / half_n).exp();
}

/// Closed-form radial quantities at one point, all evaluated from s.
///
/// psi_cap is Psi = phi^{-1} dphi/ds = tanh(n s / 2), the xi-warping of g' = phi^{-2} g in the
/// q-chart. q-derivatives use d/dq = phi d/ds.
template <std::floating_point Scalar>
struct RadialPoint {
  int n = 3;
  Scalar s = 0;
  Scalar phi = 1;
  Scalar dphi = 0;      // dphi/ds
  Scalar d2phi = 0;     // d^2 phi/ds^2
  Scalar d3phi = 0;     // d^3 phi/ds^3
  Scalar psi_cap = 0;   // Psi
  Scalar dpsi_cap = 0;  // dPsi/dq
  Scalar d2psi_cap = 0; // d^2 Psi/dq^2

  static RadialPoint at_s(Scalar s, int n) {
    detail::require_nonnegative(s);
    RadialPoint p;
    p.n = n;
    p.s = s;
    const Scalar half_n = Scalar(n) / Scalar(2);
    p.phi = geonflow::phi(s, n);
    p.psi_cap = std::tanh(half_n * s);
    p.dphi = p.phi * p.psi_cap;
    const Scalar phi_1mn = std::pow(p.phi, Scalar(1 - n));
    p.d2phi = p.phi * p.psi_cap * p.psi_cap + half_n * phi_1mn;
    p.d3phi = p.phi * p.psi_cap * p.psi_cap * p.psi_cap +
              half_n * Scalar(3 - n) * phi_1mn * p.psi_cap;
    p.dpsi_cap = half_n * phi_1mn;
    p.d2psi_cap = half_n * Scalar(1 - n) * phi_1mn * p.dphi;
    return p;
  }
};

/// Dense monotone table of q(s) = int_0^s ds' / phi(s') with its inverse.
///
/// Nodes are spaced 1/1024 on [0, s_max]; each cell integral comes from adaptive Gauss-Kronrod
/// and the interpolant is cubic Hermite with the exact slopes 1/phi. Immutable once built.
class RadialProfile {
 public:
  explicit RadialProfile(int n, double s_max = 8.0, double quadrature_tol = 1e-12);
  explicit RadialProfile(const GeonParams& params, double s_max = 8.0,
                         double quadrature_tol = 1e-12)
      : RadialProfile(params.n(), s_max, quadrature_tol) {}

  int n() const { return n_; }
  double s_max() const { return s_max_; }
  double q_max() const { return q_.back(); }
  double quadrature_tol() const { return tol_; }

  /// q(s). Beyond the table the tail is integrated directly.
  double q_of_s(double s) const;
  /// Inverse of q_of_s on [0, q_max()]. Throws RangeError beyond the table.
  double s_of_q(double q) const;

  /// Elementwise q(s) over a field.
  Eigen::ArrayXXd q_of_s(const Eigen::ArrayXXd& s) const;

 private:
  double hermite(std::size_t cell, double s) const;
  double hermite_slope(std::size_t cell, double s) const;

  int n_;
  double s_max_;
  double tol_;
  double h_;
  std::vector<double> q_;      // q at nodes
  std::vector<double> slope_;  // 1/phi at nodes
};

}  // namespace geonflow
