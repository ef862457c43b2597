#pragma once

// Weighted normal flows dF/dt = p nu of graph hypersurfaces. In graph form
//
//   n=3:  dv/dt = rho / phi(v),           n=4 (xi-symmetric):  dv/dt = rho / (phi dphi/ds)(v),
//
// integrated with classical RK4 on the method-of-lines system, spectral derivatives and an
// exponential filter.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "geonflow/graph_surface.hpp"
#include "geonflow/q_functional.hpp"

namespace geonflow {

/// Default lower bound on phi along the flow: 1.05 for n=3, (1 + 2/sqrt 3)^{1/4} for n=4.
double default_phi_floor(int n);

struct FlowConfig {
  double t_end = 1.0;
  double cfl_safety = 0.25;
  bool dealias_filter = true;
  int filter_order = 36;
  double phi_floor = 0.0;  // <= 0 selects default_phi_floor(n)
  int diag_every = 50;
  DerivativeMode derivatives = DerivativeMode::Spectral;
  /// Fixed step override (0 = derive from the CFL rule).
  double dt = 0.0;
  /// Stop diagnostics-free stepping at the exact t_end (last step shortened).
  bool land_on_t_end = true;

  void validate() const;
};

struct DiagnosticsRow {
  double t = 0.0;
  double q_surface = 0.0;
  double q_flat = 0.0;
  double q_bulk = 0.0;
  double max_rho2m1 = 0.0;
  double min_phi = 0.0;
  double height_dev_lo = 0.0;  // min of phi(v) - t (n=3) or phi^2(v) - 2t (n=4)
  double height_dev_hi = 0.0;
  double min_eig_conf = 0.0;   // min Weingarten eigenvalue in g_tilde (n=3) / g_bar (n=4)
  double dt = 0.0;
};

/// Extra per-row monitors kept out of the fixed diagnostics header.
struct MonitorRow {
  double t = 0.0;
  double flat_laplacian_term = 0.0;
  double flat_gradient_term = 0.0;
  double min_hessian_eig = 0.0;
  double hessian_monitor = 0.0;  // min_hessian_eig * t^2 / log t (n=3), * t^{3/2} / log t (n=4)
};

enum class FlowExit { Completed, ValidityExit, NumericalFailure };

std::string_view to_string(FlowExit e);

struct FlowResult {
  std::vector<DiagnosticsRow> rows;
  std::vector<MonitorRow> monitors;
  std::optional<GraphSurface> final_surface;
  QReport final_report;
  FlowExit exit = FlowExit::Completed;
  std::string message;
  long steps = 0;
  int rejected_steps = 0;
};

/// Normal speed p at phi: 1/phi (n=3) or 1/(phi dphi/ds) (n=4).
double flow_speed(double s, int n);

/// dv/dt at every node. Throws FlowDomainError when phi(v) drops below `phi_floor`
/// (pass 0 to skip the check).
Eigen::ArrayXXd rhs(const GraphSurface& surface, double phi_floor = 0.0,
                    DerivativeMode mode = DerivativeMode::Spectral);

/// One classical RK4 step of size dt followed by the optional filter.
GraphSurface step(const GraphSurface& surface, double dt, const FlowConfig& config);

/// Step size from the CFL rule.
double cfl_dt(const PeriodicGrid& grid, const FlowConfig& config);

/// Diagnostics row for a surface at time t.
DiagnosticsRow diagnose(const GraphSurface& surface, double t, double dt,
                        QReport* report = nullptr, MonitorRow* monitor = nullptr);

/// Evolves `initial` to config.t_end. Validity exits and numerical aborts are reported in the
/// result rather than thrown.
FlowResult run(const GraphSurface& initial, const FlowConfig& config);

/// Phi(t) solving dPhi/dt = (1 - Phi^{-3})^{1/2}, Phi(0) = a > 1 (lower comparison for n=3).
double ode_comparison_phi(double t, double a);

/// Heights of the coordinate torus under the flow: v(t) solving dv/dt = p(v), v(0) = s0.
double radial_flow(double t, double s0, int n, double max_step = 1e-3);

/// Least-squares slope of log max(rho^2 - 1) against log t over rows with t in [t_lo, t_hi].
double decay_fit(const std::vector<DiagnosticsRow>& rows, double t_lo, double t_hi);
/// Same for explicit series.
double decay_fit(const std::vector<double>& t, const std::vector<double>& values, double t_lo,
                 double t_hi);

/// Drift of the height deviation over rows with t in [t_lo, t_hi]: the larger of the time
/// variations of its lower and upper spatial bands.
double height_oscillation(const std::vector<DiagnosticsRow>& rows, double t_lo, double t_hi);
/// Spatial and temporal spread together: max of the upper band minus min of the lower band.
double height_spread(const std::vector<DiagnosticsRow>& rows, double t_lo, double t_hi);

/// Integrand (6 + 2 phi^{-8}) / (1 - phi^{-4}) of the 4D monotonicity argument; positive for
/// phi > 1.
double monotonicity_weight_4d(double phi_value);

inline constexpr const char* kDiagnosticsHeader =
    "t,q_surface,q_flat,q_bulk,max_rho2m1,min_phi,height_dev_lo,height_dev_hi,min_eig_conf,dt";
inline constexpr const char* kMonitorsHeader =
    "t,flat_laplacian_term,flat_gradient_term,min_hessian_eig,hessian_monitor";

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows);
void write_monitors_csv(std::ostream& os, const std::vector<MonitorRow>& rows);

}  // namespace geonflow
