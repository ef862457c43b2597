// Reference values fixed outside the library (high-precision quadrature, exact arithmetic on the
// closed forms) checked before anything else.

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "frozen_values.hpp"
#include "geonflow/curvature_tables.hpp"
#include "geonflow/fd_oracle.hpp"
#include "geonflow/flow_engine.hpp"
#include "geonflow/q_functional.hpp"

using namespace geonflow;
using std::numbers::pi;

namespace {

double s_with_phi(double target, int n) { return 2.0 / n * std::acosh(std::pow(target, n / 2.0)); }

}  // namespace

TEST_CASE("radial functions against high-precision values") {
  CHECK(std::abs(phi(1.0, 3) - frozen::kPhi_s1_n3) < 1e-14);
  CHECK(std::abs(phi(1.0, 4) - frozen::kPhi_s1_n4) < 1e-14);
  CHECK(std::abs(dphi_ds(1.0, 3) - frozen::kDphi_s1_n3) < 1e-14);
  const RadialProfile p(3);
  CHECK(std::abs(p.q_of_s(1.0) - frozen::kQ_s1_n3) < 1e-12);
  CHECK(std::abs(s_with_phi(2.0, 3) - frozen::kS_phi2_n3) < 1e-14);
}

TEST_CASE("flat-chart curvature at phi = 2") {
  for (auto [n, expected] : {std::pair{3, 1.3125}, std::pair{4, 1.40625}}) {
    const double s = s_with_phi(2.0, n);
    CHECK(std::abs(riemann_gprime_specialized(2.0, n) - expected) < 1e-14);
    CHECK(std::abs(riemann_gprime(RadialPoint<double>::at_s(s, n)).qxqx - expected) < 1e-12);
    CHECK(std::abs(fd_table(conformal_spec(n, ConformalChoice::GPrime), s).qxqx - expected) <
          1e-5);
  }
}

TEST_CASE("flow-metric curvature examples") {
  const double s3 = s_with_phi(2.0, 3);
  CHECK(std::abs(gtilde_list_3d(2.0).qxqx + 119.0) < 1e-12);
  CHECK(std::abs(riemann_conformal(RadialPoint<double>::at_s(s3, 3), ConformalChoice::GTilde).qxqx +
                 119.0) < 1e-9);
  CHECK(std::abs(fd_table(conformal_spec(3, ConformalChoice::GTilde), s3).qxqx + 119.0) <
        119.0 * 1e-5);

  const double phi4 = std::pow(2.0, 0.25);
  const double s4 = s_with_phi(phi4, 4);
  CHECK(std::abs(gbar_list_4d(phi4).qiqi - 1.0) < 1e-12);
  CHECK(std::abs(riemann_conformal(RadialPoint<double>::at_s(s4, 4), ConformalChoice::GBar).qiqi -
                 1.0) < 1e-10);
  const auto fd = fd_table(conformal_spec(4, ConformalChoice::GBar), s4);
  CHECK(std::abs(fd.qiqi - 1.0) < 1e-5 * fd.max_abs());
}

TEST_CASE("sign margin of the 4D flow metric") {
  CHECK(std::abs(gbar_convexity_margin(1.0 + 2.0 / std::sqrt(3.0))) < 1e-14);
  CHECK(gbar_convexity_margin(1.0) == -4.0);
  CHECK(gbar_convexity_margin(2.0) == -1.0);
}

TEST_CASE("coordinate torus at phi = 2") {
  const GeonParams params(3, {1.0});
  const TorusExact t = torus_exact(params, frozen::kS_phi2_n3);
  CHECK(std::abs(t.mean_curvature - frozen::kH_torus_phi2_n3) < 1e-12);
  CHECK(std::abs(t.mean_curvature - 2.07128) < 1e-5);
  CHECK(std::abs(t.bulk_term - 56.0 * pi / 3.0) < 1e-9);
  CHECK(std::abs(t.bulk_term - frozen::kBulk_phi2_n3) < 1e-12);
}

TEST_CASE("mass and bound values") {
  CHECK(std::abs(mass(GeonParams(3, {1.0})) + 4.0 * pi / 3.0) < 1e-15);
  CHECK(std::abs(mass(GeonParams(4, {1.0, 1.0})) + pi) < 1e-15);
  CHECK(std::abs(bound(GeonParams(3, {1.0})) - 2.0 * pi) < 1e-14);
  CHECK(std::abs(bound(GeonParams(4, {1.0, 1.0})) - 2.0 * pi) < 1e-14);
  CHECK(std::abs(bound(GeonParams(4, {2.0, 3.0})) - 12.0 * pi) < 1e-13);
}

TEST_CASE("radial flow and comparison ODE against quadrature inversion") {
  CHECK(std::abs(radial_flow(5.0, frozen::kS_phi2_n3, 3) - frozen::kRadialFlow_n3_phi2_T5) < 1e-10);
  CHECK(std::abs(radial_flow(5.0, frozen::kS_phi15_n4, 4) - frozen::kRadialFlow_n4_phi15_T5) <
        1e-10);
  CHECK(std::abs(ode_comparison_phi(10.0, 2.0) - frozen::kComparison_a2_t10) < 1e-10);
  CHECK(std::abs(ode_comparison_phi(100.0, 2.0) - frozen::kComparison_a2_t100) < 1e-9);
}
