#pragma once

#include <array>
#include <cmath>

namespace geonflow {

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
double gauss_kronrod_15(const F& f, double a, double b, double& err) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * pair;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  err = std::abs((kronrod - gauss) * half);
  return kronrod * half;
}

template <typename F>
double adaptive_gk(const F& f, double a, double b, double tol, int depth) {
  double err = 0.0;
  const double whole = gauss_kronrod_15(f, a, b, err);
  if (err <= tol || depth <= 0) return whole;
  const double mid = 0.5 * (a + b);
  return adaptive_gk(f, a, mid, 0.5 * tol, depth - 1) +
         adaptive_gk(f, mid, b, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (G7/K15) quadrature of f over [a, b] to absolute tolerance tol.
template <typename F>
double integrate(const F& f, double a, double b, double tol = 1e-12) {
  if (a == b) return 0.0;
  return detail::adaptive_gk(f, a, b, tol, 40);
}

}  // namespace geonflow
