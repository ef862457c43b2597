#pragma once

// Oracle suites behind `geonflow verify`: closed-form curvature against the FD Riemann oracle,
// the static equation of the geon, and equivalence of the second-fundamental-form routes.

#include <cstdint>
#include <string>
#include <vector>

namespace geonflow {

struct CheckResult {
  std::string suite;
  std::string name;    // e.g. "g_tilde n=3 R_qxqx"
  std::string anchor;  // which identity the check exercises
  double position = 0.0;
  double closed = 0.0;
  double oracle = 0.0;
  double error = 0.0;  // relative or absolute, see `relative`
  double tolerance = 0.0;
  bool relative = true;
  bool expect_above = false;  // sensitivity probes must exceed the tolerance instead
  bool pass = false;
};

struct VerifyReport {
  std::vector<CheckResult> checks;

  bool passed() const;
  std::size_t failures() const;
  double max_error(const std::string& suite) const;
  void append(const VerifyReport& other);
  std::string to_json() const;
};

struct VerifyOptions {
  int samples = 100;           // random radial positions per dimension
  int graphs = 4;              // random graphs for the surface suite
  int grid = 64;               // grid size for the surface suite
  int nodes_per_graph = 12;    // nodes probed by the embedding oracle
  std::uint64_t seed = 20240601;
  bool inject_sign_fault = false;  // flips one closed-form sign (harness sensitivity)
};

VerifyReport verify_curvature(const VerifyOptions& options = {});
VerifyReport verify_static(const VerifyOptions& options = {});
VerifyReport verify_surface_forms(const VerifyOptions& options = {});
VerifyReport verify_all(const VerifyOptions& options = {});

}  // namespace geonflow
