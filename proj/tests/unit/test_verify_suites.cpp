#include <doctest.h>

#include <json.hpp>

#include "geonflow/verify.hpp"

using namespace geonflow;

TEST_CASE("curvature suite") {
  VerifyOptions o;
  o.samples = 30;
  const auto r = verify_curvature(o);
  CHECK(r.checks.size() > 100);
  CHECK(r.passed());
  CHECK(r.max_error("curvature") < 1e-5);
}

TEST_CASE("static suite") {
  VerifyOptions o;
  o.samples = 30;
  const auto r = verify_static(o);
  CHECK(r.passed());
  bool probed = false;
  for (const auto& c : r.checks) probed |= c.expect_above;
  CHECK(probed);
}

TEST_CASE("surface suite") {
  VerifyOptions o;
  o.graphs = 2;
  o.grid = 32;
  o.nodes_per_graph = 4;
  const auto r = verify_surface_forms(o);
  CHECK(r.passed());
}

TEST_CASE("a flipped sign is caught") {
  VerifyOptions o;
  o.samples = 10;
  o.inject_sign_fault = true;
  const auto r = verify_curvature(o);
  CHECK_FALSE(r.passed());
  CHECK(r.failures() >= 1);
}

TEST_CASE("report JSON") {
  VerifyOptions o;
  o.samples = 5;
  const auto r = verify_static(o);
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j.is_object());
  CHECK(j.dump().find("static") != std::string::npos);
}
