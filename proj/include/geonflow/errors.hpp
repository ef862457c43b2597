#pragma once

#include <stdexcept>
#include <string>

namespace geonflow {

/// Argument outside the mathematical domain of a closed form (negative s, a <= 1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation at the central torus s = 0 where dphi/ds vanishes and the xi-circle collapses.
class SingularAxisError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Query outside the tabulated radial range; the caller should rebuild with a larger s_max.
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Finite-difference probe hit a non-positive metric component.
class ProbeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Surface left the region where the flow is defined (floor on phi violated).
class FlowDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decay fit window too short or reaching the round-off floor.
class FitWindowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed run configuration. `line()` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace geonflow
