#include "geonflow/curvature_tables.hpp"

namespace geonflow {

namespace {
RadialPoint<double> point_at_q(double q, const RadialProfile& profile) {
  return RadialPoint<double>::at_s(profile.s_of_q(q), profile.n());
}
}  // namespace

ChristoffelGPrime<double> christoffel_gprime_at_q(double q, const RadialProfile& profile) {
  return christoffel_gprime(point_at_q(q, profile));
}

CurvatureTable<double> riemann_gprime_at_q(double q, const RadialProfile& profile) {
  return riemann_gprime(point_at_q(q, profile));
}

CurvatureTable<double> riemann_conformal_at_q(double q, ConformalChoice c,
                                              const RadialProfile& profile) {
  return riemann_conformal(point_at_q(q, profile), c);
}

}  // namespace geonflow
