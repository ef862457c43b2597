#include "geonflow/q_functional.hpp"

#include <algorithm>
#include <cmath>

namespace geonflow {

using Eigen::ArrayXXd;

double weighted_sum(const ArrayXXd& f, double weight) {
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const double x = f.data()[k];
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return (sum + comp) * weight;
}

double QReport::spread() const {
  return std::max({std::abs(q_surface - q_bulk), std::abs(q_surface - q_flat),
                   std::abs(q_bulk - q_flat)});
}

namespace {

ArrayXXd phi_pow(const SurfaceGeometry& g, int k) { return (double(k) * g.phi.log()).exp(); }

// phi H dvol_gamma per unit coordinate area.
ArrayXXd weighted_mean_curvature(const SurfaceGeometry& g) {
  const ArrayXXd h = mean_curvature(g, ConformalChoice::G);
  return g.phi * h * g.rho * phi_pow(g, g.n - 2) * g.dphi;
}

}  // namespace

ArrayXXd q_surface_density(const SurfaceGeometry& g) {
  const ArrayXXd normal_term = (g.n - 1) * g.dphi / g.rho;
  const ArrayXXd dvol = g.rho * phi_pow(g, g.n - 2) * g.dphi;
  return normal_term * dvol - weighted_mean_curvature(g);
}

double q_surface(const SurfaceGeometry& g) {
  return weighted_sum(q_surface_density(g), g.cell_weight);
}

double bulk_term(const SurfaceGeometry& g) {
  return weighted_sum((g.n - 1) * (phi_pow(g, g.n) - 1.0), g.cell_weight);
}

double q_bulk(const SurfaceGeometry& g) {
  return bulk_term(g) - weighted_sum(weighted_mean_curvature(g), g.cell_weight);
}

namespace {

struct FlatTerms {
  double laplacian, gradient;
};

FlatTerms flat_terms(const SurfaceGeometry& g) {
  const ArrayXXd lap = laplacian_u_divergence(g);
  const double a = weighted_sum(g.rho.square() * phi_pow(g, g.n - 2) * g.dphi * lap,
                                g.cell_weight);
  const double b = -0.5 * g.n * weighted_sum(g.theta_grad2(), g.cell_weight);
  return {a, b};
}

}  // namespace

double q_flat(const SurfaceGeometry& g) {
  const auto [lap, grad] = flat_terms(g);
  return lap + grad + 0.5 * g.n * g.mass;
}

double bound(const GeonParams& params) { return -0.5 * params.n() * mass(params); }

QReport q_report(const SurfaceGeometry& g) {
  QReport r;
  r.q_surface = q_surface(g);
  r.q_bulk = q_bulk(g);
  const auto [lap, grad] = flat_terms(g);
  r.flat_laplacian_term = lap;
  r.flat_gradient_term = grad;
  r.torus_value = 0.5 * g.n * g.mass;
  r.q_flat = lap + grad + r.torus_value;
  r.bound = -r.torus_value;
  return r;
}

QReport q_report(const GraphSurface& surface) { return q_report(analyze(surface)); }

TorusExact torus_exact(const GeonParams& params, double s0) {
  if (!(s0 > 0.0)) throw SingularAxisError("coordinate torus must lie off the central torus");
  const int n = params.n();
  const auto p = RadialPoint<double>::at_s(s0, n);
  const double area = params.coordinate_area();
  TorusExact t;
  t.s0 = s0;
  t.phi = p.phi;
  // H = phi^{-1} (Psi_q / Psi + (n-1) dphi/ds) for u constant.
  t.mean_curvature = (p.dpsi_cap / p.psi_cap + (n - 1) * p.dphi) / p.phi;
  const double dvol = std::pow(p.phi, n - 2) * p.dphi;
  t.bulk_term = (n - 1) * (std::pow(p.phi, n) - 1.0) * area;
  t.q = t.bulk_term - p.phi * t.mean_curvature * dvol * area;
  t.mass = mass(params);
  t.bound = bound(params);
  return t;
}

}  // namespace geonflow
