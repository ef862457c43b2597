#pragma once

// The Minkowski-type functional
//
//   Q(Sigma) = n(n-1) int_Omega phi dvol_g - int_Sigma phi H dvol_gamma
//            = int_Sigma (n-1) g(grad phi, nu) - phi H dvol_gamma,
//
// with Omega the region between the central torus and Sigma, evaluated on graphs by the
// trapezoidal rule (spectrally accurate for smooth periodic integrands).
//
// On coordinate tori Q = n m / 2 = -(n/2)|m|. The flat-chart route therefore adds n m / 2 to the
// integral of rho^2 phi^{n-2} dphi Delta'u - (n/2)|u_theta|^2.

#include <Eigen/Core>

#include "geonflow/graph_surface.hpp"

namespace geonflow {

struct QReport {
  double q_surface = 0.0;  // surface integral of (n-1) g(grad phi, nu) - phi H
  double q_bulk = 0.0;     // int (n-1)(phi^n - 1) - phi H dvol_gamma
  double q_flat = 0.0;     // flat-chart integral plus n m / 2
  double bound = 0.0;      // -n m / 2, as stated for the rigidity inequality
  double torus_value = 0.0;  // n m / 2, the value taken on every coordinate torus
  double flat_laplacian_term = 0.0;  // int rho^2 phi^{n-2} dphi Delta'u
  double flat_gradient_term = 0.0;   // -(n/2) int |u_theta|^2
  /// Largest pairwise difference of the three routes.
  double spread() const;
};

/// Integrand of the surface route per coordinate cell (already multiplied by dvol).
Eigen::ArrayXXd q_surface_density(const SurfaceGeometry& geo);

double q_surface(const SurfaceGeometry& geo);
/// n(n-1) int_Omega phi dvol_g = (n-1) int (phi^n(v) - 1) over the coordinate torus.
double bulk_term(const SurfaceGeometry& geo);
double q_bulk(const SurfaceGeometry& geo);
double q_flat(const SurfaceGeometry& geo);

QReport q_report(const SurfaceGeometry& geo);
QReport q_report(const GraphSurface& surface);

/// The stated upper bound -n m / 2.
double bound(const GeonParams& params);

/// Closed-form data of the coordinate torus s = s0, evaluated from the radial functions alone.
struct TorusExact {
  double s0 = 0.0;
  double phi = 0.0;
  double mean_curvature = 0.0;  // H in g
  double q = 0.0;               // equals n m / 2 for every s0 > 0
  double bulk_term = 0.0;       // (n-1) (phi^n - 1) * coordinate area
  double mass = 0.0;
  double bound = 0.0;
};

TorusExact torus_exact(const GeonParams& params, double s0);

/// Fixed-order Neumaier sum over a field times a weight.
double weighted_sum(const Eigen::ArrayXXd& f, double weight);

}  // namespace geonflow
