#include <doctest.h>

#include <cmath>
#include <sstream>

#include "frozen_values.hpp"
#include "geonflow/errors.hpp"
#include "geonflow/flow_engine.hpp"

using namespace geonflow;
using Eigen::ArrayXXd;

namespace {

GeonParams params_for(int n) { return GeonParams(n, std::vector<double>(n - 2, 1.0)); }

GraphSurface torus(int n, double s0, int N = 16) {
  const auto p = params_for(n);
  return coordinate_torus(p, PeriodicGrid::for_params(p, N, N), s0);
}

double s_with_phi(double target, int n) { return 2.0 / n * std::acosh(std::pow(target, n / 2.0)); }

}  // namespace

TEST_CASE("speed on coordinate tori") {
  CHECK((rhs(torus(3, frozen::kS_phi2_n3)) - 0.5).abs().maxCoeff() < 1e-14);
  const double expected4 = 1.0 / (4.0 * std::sqrt(15.0 / 16.0));
  CHECK((rhs(torus(4, s_with_phi(2.0, 4))) - expected4).abs().maxCoeff() < 1e-13);
  CHECK(std::abs(flow_speed(frozen::kS_phi2_n3, 3) - 0.5) < 1e-14);
}

TEST_CASE("speed is at least 1/phi on tilted graphs") {
  const auto p = params_for(3);
  const auto s = mode_surface(p, PeriodicGrid::for_params(p, 32, 32), 1.0,
                              {{1, 1, 0.1, 0.0}, {2, 0, 0.05, 0.4}});
  const ArrayXXd v = rhs(s);
  CHECK((v * phi(s.v(), 3) - 1.0).minCoeff() > -1e-14);
}

TEST_CASE("floor check in the speed") {
  CHECK_THROWS_AS(rhs(torus(3, 0.2), 1.05), FlowDomainError);
  CHECK_NOTHROW(rhs(torus(3, 0.2)));
}

TEST_CASE("coordinate tori follow the radial ODE") {
  for (int n : {3, 4}) {
    const double s0 = n == 3 ? frozen::kS_phi2_n3 : frozen::kS_phi15_n4;
    FlowConfig c;
    c.t_end = 5.0;
    c.dt = 0.01;
    c.diag_every = 1000;
    const auto r = run(torus(n, s0), c);
    REQUIRE(r.exit == FlowExit::Completed);
    const double expected = n == 3 ? frozen::kRadialFlow_n3_phi2_T5 : frozen::kRadialFlow_n4_phi15_T5;
    CHECK((r.final_surface->v() - expected).abs().maxCoeff() < 1e-8);
    CHECK(std::abs(r.rows.back().t - 5.0) < 1e-12);
    CHECK(std::abs(r.rows.back().q_surface - r.rows.front().q_surface) < 1e-10);
  }
}

TEST_CASE("time stepping is fourth order") {
  const double s0 = frozen::kS_phi2_n3;
  const double exact = radial_flow(2.0, s0, 3, 1e-4);
  double err[2];
  int k = 0;
  for (double dt : {0.1, 0.05}) {
    FlowConfig c;
    c.t_end = 2.0;
    c.dt = dt;
    c.diag_every = 1000;
    err[k++] = std::abs(run(torus(3, s0), c).final_surface->v()(0, 0) - exact);
  }
  const double order = std::log2(err[0] / err[1]);
  CHECK(order > 3.7);
  CHECK(order < 4.3);
}

TEST_CASE("reflection symmetry is preserved") {
  const auto p = params_for(3);
  const auto s = mode_surface(p, PeriodicGrid::for_params(p, 32, 32), 1.2,
                              {{1, 0, 0.05, 0.0}, {0, 2, 0.03, 0.0}});
  FlowConfig c;
  c.t_end = 1.0;
  const auto v = run(s, c).final_surface->v();
  for (int j = 0; j < 32; ++j)
    for (int i = 1; i < 32; ++i) CHECK(std::abs(v(i, j) - v(32 - i, j)) < 1e-12);
}

TEST_CASE("validity exit below the floor") {
  FlowConfig c;
  c.t_end = 1.0;
  c.phi_floor = 2.5;
  const auto r = run(torus(3, frozen::kS_phi2_n3), c);
  CHECK(r.exit == FlowExit::ValidityExit);
  CHECK(r.steps == 0);
  CHECK(r.final_surface.has_value());
  CHECK(to_string(r.exit) != to_string(FlowExit::Completed));
}

TEST_CASE("configuration checks") {
  FlowConfig c;
  c.t_end = 0.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.t_end = 1.0;
  c.filter_order = 3;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.filter_order = 36;
  c.cfl_safety = 1.5;
  CHECK_THROWS_AS(c.validate(), DomainError);
  CHECK_THROWS_AS(step(torus(3, 1.0), 0.0, FlowConfig{}), DomainError);
}

TEST_CASE("Q increases towards the torus value") {
  const auto p = params_for(3);
  const auto s = mode_surface(p, PeriodicGrid::for_params(p, 32, 32), frozen::kS_phi2_n3,
                              {{1, 0, 0.05, 0.0}, {0, 1, 0.05, 0.7}});
  FlowConfig c;
  c.t_end = 3.0;
  c.diag_every = 5;
  const auto r = run(s, c);
  REQUIRE(r.exit == FlowExit::Completed);
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    CHECK(r.rows[k].q_surface >= r.rows[k - 1].q_surface - 1e-9);
    CHECK(r.rows[k].q_surface <= r.final_report.torus_value + 1e-9);
  }
}

TEST_CASE("comparison ODE") {
  CHECK(ode_comparison_phi(0.0, 2.0) == 2.0);
  double prev = 2.0;
  for (double t = 1.0; t <= 20.0; t += 1.0) {
    const double x = ode_comparison_phi(t, 2.0);
    CHECK(x > prev);
    CHECK(x - t < 2.0);
    prev = x;
  }
  CHECK_THROWS_AS(ode_comparison_phi(1.0, 1.0), DomainError);
  CHECK(monotonicity_weight_4d(1.5) > 0.0);
  CHECK_THROWS_AS(monotonicity_weight_4d(1.0), DomainError);
}

TEST_CASE("decay fit") {
  std::vector<double> t, y;
  for (int k = 0; k <= 100; ++k) {
    t.push_back(1.0 + k);
    y.push_back(3.0 * std::pow(1.0 + k, -4.0));
  }
  CHECK(std::abs(decay_fit(t, y, 10.0, 101.0) + 4.0) < 1e-10);
  CHECK_THROWS_AS(decay_fit(t, y, 10.0, 20.0), FitWindowError);
  y[50] = 0.0;
  CHECK_THROWS_AS(decay_fit(t, y, 10.0, 101.0), FitWindowError);
}

TEST_CASE("height drift and spread") {
  std::vector<DiagnosticsRow> rows(3);
  for (int k = 0; k < 3; ++k) {
    rows[k].t = 10.0 * (k + 1);
    rows[k].height_dev_lo = 1.0 + 0.1 * k;
    rows[k].height_dev_hi = 2.0 - 0.05 * k;
  }
  CHECK(std::abs(height_oscillation(rows, 0.0, 100.0) - 0.2) < 1e-15);
  CHECK(std::abs(height_spread(rows, 0.0, 100.0) - 1.0) < 1e-15);
  CHECK_THROWS_AS(height_oscillation(rows, 40.0, 50.0), FitWindowError);
}

TEST_CASE("diagnostics CSV") {
  FlowConfig c;
  c.t_end = 0.5;
  const auto r = run(torus(3, 1.0), c);
  std::ostringstream os;
  write_diagnostics_csv(os, r.rows);
  const std::string text = os.str();
  CHECK(text.rfind(std::string(kDiagnosticsHeader) + "\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(r.rows.size()) + 1);
  CHECK(height_oscillation(r.rows, 0.0, 0.5) >= 0.0);
}
