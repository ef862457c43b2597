#pragma once

// Finite-difference oracles. Everything here is built from metric components alone, evaluated
// with elementary functions in the s-chart, so it shares no curvature code with the closed forms.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "geonflow/curvature_tables.hpp"
#include "geonflow/graph_surface.hpp"

namespace geonflow {

/// g = A(s) ds^2 + B(s) dxi^2 + C(s) sum_i (dtheta^i)^2 on coordinates (s, xi, theta^3..theta^n).
struct DiagonalMetricSpec {
  int n = 3;
  std::function<double(double)> radial;  // A
  std::function<double(double)> xi;      // B
  std::function<double(double)> theta;   // C
  double fd_step = 1e-3;
  bool richardson = true;
  std::string label;

  int dim() const { return n; }
  /// Diagonal metric components at s; throws ProbeError if any is non-positive.
  std::vector<double> diagonal(double s) const;
};

/// Flat metric ds^2 + dxi^2 + sum dtheta^2.
DiagonalMetricSpec flat_spec(int n);
/// e^{2 psi} g' written in the s-chart, i.e. c(s) (ds^2 + dphi^2 dxi^2 + phi^2 dtheta^2) with
/// c = phi^{-2}, 1, phi^2, phi^2 dphi^2 for the four choices. phi is evaluated from cosh directly.
DiagonalMetricSpec conformal_spec(int n, ConformalChoice choice);

/// Lowered Riemann tensor R_{abcd} in the s-chart, dim^4 entries.
struct RiemannTensor {
  int dim = 0;
  std::vector<double> data;

  double operator()(int a, int b, int c, int d) const {
    return data[((a * dim + b) * dim + c) * dim + d];
  }
  double& at(int a, int b, int c, int d) { return data[((a * dim + b) * dim + c) * dim + d]; }
  /// max |R_abcd + R_acdb + R_adbc| over all index choices.
  double bianchi_residual() const;
  /// max |R_abcd + R_bacd| + |R_abcd + R_abdc| + |R_abcd - R_cdab|.
  double symmetry_residual() const;
};

/// Christoffel symbols Gamma^a_{bc} at s from centred differences of the metric.
std::vector<double> christoffel_fd(const DiagonalMetricSpec& spec, double s, double h);

/// Riemann tensor from centred differences of the FD Christoffels, with one Richardson level
/// (steps h and h/2) unless disabled.
RiemannTensor riemann_fd(const DiagonalMetricSpec& spec, double s);

/// The four component families of the closed-form tables, read off an FD tensor at s and
/// converted to the q-frame (R_{q X q X} = phi^2 R_{s X s X}).
CurvatureTable<double> fd_table(const DiagonalMetricSpec& spec, double s);

/// Radial profile entering the static-equation check; `dphi` must be the derivative of `phi`.
struct StaticProfile {
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
};

StaticProfile geon_profile(int n);
/// phi(s) (1 + eps s), a deliberately wrong potential for sensitivity checks.
StaticProfile perturbed_profile(int n, double eps);

struct StaticResidual {
  double tensor = 0.0;  // max |g Lap phi + phi Ric - Hess phi| in an orthonormal frame, over phi
  double scalar = 0.0;  // |R_g + n(n-1)|
};

StaticResidual static_residual(double s, int n, const StaticProfile& profile,
                               double fd_step = 1e-3);
StaticResidual static_residual(double s, int n);

/// Second fundamental form of the graph at grid node (i, j) in e^{2 psi} g', computed from the
/// embedding F = (v(x), x) in the s-chart: FD covariant derivatives of dF, projected on the unit
/// normal. Heights come from the trigonometric interpolant of v.
struct NodeForm {
  double xx = 0.0, xy = 0.0, yy = 0.0, axial = 0.0;
};

NodeForm embed_second_form_fd(const GraphSurface& surface, ConformalChoice choice, int i, int j,
                              double fd_step = 1e-3);

}  // namespace geonflow
