#pragma once

// Closed-form connection and curvature of
//
//   g' = dq^2 + Psi(q)^2 dxi^2 + sum_i (dtheta^i)^2,     Psi = phi^{-1} dphi/ds,
//
// and of its conformal rescalings e^{2 psi} g'. Components are lowered-index in the coordinate
// frame (q, xi, theta^i), with the convention R_{abab} = K (g_aa g_bb) for sectional curvature K.
// All q-derivatives go through d/dq = phi d/ds on closed forms; nothing here differentiates
// numerically.

#include <cmath>
#include <concepts>
#include <string_view>

#include "geonflow/errors.hpp"
#include "geonflow/geon_background.hpp"

namespace geonflow {

/// Conformal representative e^{2 psi} g' of the geon metric.
///   GPrime: psi = 0 (flat chart), G: psi = log phi (the geon metric itself),
///   GTilde: psi = 2 log phi (3D flow metric), GBar: psi = 2 log phi + log dphi/ds (4D flow metric).
enum class ConformalChoice { GPrime, G, GTilde, GBar };

inline constexpr ConformalChoice kAllChoices[] = {ConformalChoice::GPrime, ConformalChoice::G,
                                                  ConformalChoice::GTilde, ConformalChoice::GBar};

constexpr std::string_view to_string(ConformalChoice c) {
  switch (c) {
    case ConformalChoice::GPrime: return "g_prime";
    case ConformalChoice::G: return "g";
    case ConformalChoice::GTilde: return "g_tilde";
    case ConformalChoice::GBar: return "g_bar";
  }
  return "?";
}

/// e^psi and the first two q-derivatives of psi at one radial point.
template <std::floating_point Scalar>
struct ConformalExponent {
  Scalar exp_psi = 1;
  Scalar dpsi = 0;   // dpsi/dq
  Scalar d2psi = 0;  // d^2 psi/dq^2
};

template <std::floating_point Scalar>
ConformalExponent<Scalar> conformal_exponent(const RadialPoint<Scalar>& p, ConformalChoice c) {
  ConformalExponent<Scalar> e;
  switch (c) {
    case ConformalChoice::GPrime:
      break;
    case ConformalChoice::G:
      e.exp_psi = p.phi;
      e.dpsi = p.dphi;
      e.d2psi = p.phi * p.d2phi;
      break;
    case ConformalChoice::GTilde:
      e.exp_psi = p.phi * p.phi;
      e.dpsi = Scalar(2) * p.dphi;
      e.d2psi = Scalar(2) * p.phi * p.d2phi;
      break;
    case ConformalChoice::GBar: {
      if (!(p.dphi > Scalar(0)))
        throw SingularAxisError("g_bar is degenerate on the central torus (dphi/ds = 0)");
      const Scalar r = p.d2phi / p.dphi;
      e.exp_psi = p.phi * p.phi * p.dphi;
      e.dpsi = Scalar(2) * p.dphi + p.phi * r;
      e.d2psi = p.phi * (Scalar(2) * p.d2phi + p.d2phi + p.phi * p.d3phi / p.dphi -
                         p.phi * r * r);
      break;
    }
  }
  return e;
}

/// The two non-zero Christoffel symbols of g'.
template <std::floating_point Scalar>
struct ChristoffelGPrime {
  Scalar xi_q_xi;  // Gamma'^xi_{q xi} = Psi^{-1} dPsi/dq
  Scalar q_xi_xi;  // Gamma'^q_{xi xi} = -Psi dPsi/dq
};

template <std::floating_point Scalar>
ChristoffelGPrime<Scalar> christoffel_gprime(const RadialPoint<Scalar>& p) {
  if (!(p.psi_cap > Scalar(0)))
    throw SingularAxisError("Psi vanishes on the central torus");
  return {p.dpsi_cap / p.psi_cap, -p.psi_cap * p.dpsi_cap};
}

/// Non-zero lowered Riemann components in the (q, xi, theta^i) frame. `ijij` only exists for n=4.
template <std::floating_point Scalar>
struct CurvatureTable {
  ConformalChoice choice = ConformalChoice::GPrime;
  Scalar s = 0;
  Scalar qxqx = 0;  // R_{q xi q xi}
  Scalar qiqi = 0;  // R_{q i q i}
  Scalar xixi = 0;  // R_{xi i xi i}
  Scalar ijij = 0;  // R_{i j i j}, i != j

  Scalar max_abs() const {
    using std::abs, std::max;
    return max(max(abs(qxqx), abs(qiqi)), max(abs(xixi), abs(ijij)));
  }
};

/// R'_{q xi q xi} = -Psi d^2Psi/dq^2, the only non-zero component of g'.
template <std::floating_point Scalar>
CurvatureTable<Scalar> riemann_gprime(const RadialPoint<Scalar>& p) {
  CurvatureTable<Scalar> t;
  t.s = p.s;
  t.qxqx = -p.psi_cap * p.d2psi_cap;
  return t;
}

/// Dimension-specialised R'_{q xi q xi}: 3 phi^{-1}(1 - phi^{-3}) for n=3, 6 phi^{-2}(1 - phi^{-4})
/// for n=4.
template <std::floating_point Scalar>
Scalar riemann_gprime_specialized(Scalar phi_value, int n) {
  const Scalar decay = Scalar(1) - std::pow(phi_value, Scalar(-n));
  return n == 3 ? Scalar(3) / phi_value * decay : Scalar(6) / (phi_value * phi_value) * decay;
}

/// Curvature of e^{2 psi} g' from the general conformal-change formula.
template <std::floating_point Scalar>
CurvatureTable<Scalar> riemann_conformal(const RadialPoint<Scalar>& p, ConformalChoice c) {
  const auto e = conformal_exponent(p, c);
  const Scalar e2 = e.exp_psi * e.exp_psi;
  const Scalar Psi = p.psi_cap, dPsi = p.dpsi_cap, d2Psi = p.d2psi_cap;
  CurvatureTable<Scalar> t;
  t.choice = c;
  t.s = p.s;
  t.qxqx = -e2 * (Psi * d2Psi + Psi * Psi * e.d2psi + Psi * dPsi * e.dpsi);
  t.qiqi = -e2 * e.d2psi;
  t.xixi = -e2 * (Psi * dPsi * e.dpsi + Psi * Psi * e.dpsi * e.dpsi);
  t.ijij = p.n == 4 ? -e2 * e.dpsi * e.dpsi : Scalar(0);
  return t;
}

/// Curvature of g~ = phi^2 g for n=3 written as polynomials in phi^{-3}.
template <std::floating_point Scalar>
CurvatureTable<Scalar> gtilde_list_3d(Scalar phi_value) {
  const Scalar p6 = std::pow(phi_value, Scalar(6));
  const Scalar x = std::pow(phi_value, Scalar(-3));
  CurvatureTable<Scalar> t;
  t.choice = ConformalChoice::GTilde;
  t.qxqx = -p6 * (Scalar(2) + x) * (Scalar(1) - x);
  t.qiqi = -p6 * (Scalar(2) + x);
  t.xixi = -p6 * (Scalar(4) - x) * (Scalar(1) - x);
  return t;
}

/// Curvature of g_bar = (phi dphi/ds)^2 g for n=4 as polynomials in phi^{-4}.
///
/// The i != j entry is -phi^8 (3 - phi^{-4})^2; the printed (1 - phi^{-4})^2 variant is kept as
/// gbar_ijij_as_printed() and disagrees with both the general formula and the FD oracle.
template <std::floating_point Scalar>
CurvatureTable<Scalar> gbar_list_4d(Scalar phi_value) {
  const Scalar p8 = std::pow(phi_value, Scalar(8));
  const Scalar x = std::pow(phi_value, Scalar(-4));
  CurvatureTable<Scalar> t;
  t.choice = ConformalChoice::GBar;
  t.qxqx = -Scalar(3) * p8 * (Scalar(1) - x) * (Scalar(1) - x) * (Scalar(1) - x);
  t.qiqi = -p8 * (Scalar(3) - Scalar(6) * x - x * x);
  t.xixi = -p8 * (Scalar(9) - x * x) * (Scalar(1) - x);
  t.ijij = -p8 * (Scalar(3) - x) * (Scalar(3) - x);
  return t;
}

template <std::floating_point Scalar>
Scalar gbar_ijij_as_printed(Scalar phi_value) {
  const Scalar x = std::pow(phi_value, Scalar(-4));
  return -std::pow(phi_value, Scalar(8)) * (Scalar(1) - x) * (Scalar(1) - x);
}

/// 3 x^2 - 6 x - 1 at x = phi^4; R_bar_{q i q i} = -phi^8 x^{-2} (3x^2 - 6x - 1), so the
/// component is non-positive exactly when x >= 1 + 2/sqrt(3).
template <std::floating_point Scalar>
Scalar gbar_convexity_margin(Scalar phi4) {
  if (!(phi4 >= Scalar(1))) throw DomainError("phi^4 must be at least 1");
  return Scalar(3) * phi4 * phi4 - Scalar(6) * phi4 - Scalar(1);
}

/// Root of the margin polynomial above 1: 1 + 2/sqrt(3).
inline double gbar_margin_root() { return 1.0 + 2.0 / std::sqrt(3.0); }

/// Convenience overloads taking the flat-chart coordinate q.
ChristoffelGPrime<double> christoffel_gprime_at_q(double q, const RadialProfile& profile);
CurvatureTable<double> riemann_gprime_at_q(double q, const RadialProfile& profile);
CurvatureTable<double> riemann_conformal_at_q(double q, ConformalChoice c,
                                              const RadialProfile& profile);

}  // namespace geonflow
