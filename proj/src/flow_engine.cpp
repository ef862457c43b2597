#include "geonflow/flow_engine.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "geonflow/io.hpp"

namespace geonflow {

using Eigen::ArrayXXd;

double default_phi_floor(int n) {
  return n == 3 ? 1.05 : std::pow(gbar_margin_root(), 0.25);
}

void FlowConfig::validate() const {
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) throw DomainError("cfl_safety must lie in (0, 1]");
  if (filter_order < 2 || filter_order % 2 != 0)
    throw DomainError("filter order must be an even integer >= 2");
  if (diag_every < 1) throw DomainError("diag_every must be at least 1");
  if (dt < 0.0) throw DomainError("dt override must be non-negative");
}

std::string_view to_string(FlowExit e) {
  switch (e) {
    case FlowExit::Completed: return "completed";
    case FlowExit::ValidityExit: return "validity_exit";
    case FlowExit::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

double flow_speed(double s, int n) {
  const auto p = RadialPoint<double>::at_s(s, n);
  return n == 3 ? 1.0 / p.phi : 1.0 / (p.phi * p.dphi);
}

namespace {

// s at which phi(s) = target.
double s_at_phi(double target, int n) {
  if (target <= 1.0) return 0.0;
  return 2.0 / n * std::acosh(std::pow(target, 0.5 * n));
}

// Scratch for the stepping loop; every field keeps its allocation across steps.
struct Workspace {
  ArrayXXd e, inv_phi2, vx, vy, k1, k2, k3, k4, stage, next;
};

// Cube root on [1, 2]: Halley's iteration from a linear start (1.3% error) reaches round-off in
// two steps.
ArrayXXd cbrt_1_2(const ArrayXXd& y) {
  ArrayXXd x = 0.74 + 0.26 * y;
  for (int k = 0; k < 2; ++k) x = x * (x.cube() + 2.0 * y) / (2.0 * x.cube() + y);
  return x;
}

// dv/dt into `out`, using only one exponential per node:
//   n=4: with w = e^{-2v}, phi^{-2} = 2w / (1 + w^2) and Psi = (1 - w^2) / (1 + w^2);
//   n=3: with w = e^{-v}, e = w^3, phi^{-2} = w^2 (2 / (1 + e))^{4/3} and Psi = (1 - e) / (1 + e).
void speed_into(const SpectralOps& ops, const ArrayXXd& v, int n, DerivativeMode mode,
                Workspace& w, ArrayXXd& out) {
  if (n == 4) {
    w.e = (-2.0 * v).exp();
    w.inv_phi2 = 2.0 * w.e / (1.0 + w.e.square());
    w.e = w.e.square();
  } else {
    w.inv_phi2 = (-v).exp();
    w.e = w.inv_phi2.cube();
    const ArrayXXd y = 2.0 / (1.0 + w.e);
    w.inv_phi2 = w.inv_phi2.square() * y * cbrt_1_2(y);
  }
  if (mode == DerivativeMode::Spectral) {
    ops.gradient_into(v, w.vx, w.vy);
  } else {
    auto p = fd4_partials(ops.grid(), v);
    w.vx = std::move(p.x);
    w.vy = std::move(p.y);
  }
  if (n == 3) {
    // rho / phi = sqrt(phi^{-2} + phi^{-4} (v_xi^2 / Psi^2 + v_theta^2))
    out = (w.inv_phi2 * (1.0 + w.inv_phi2 * (w.vx * (1.0 + w.e) / (1.0 - w.e)).square() +
                         w.inv_phi2 * w.vy.square()))
              .sqrt();
  } else {
    // rho / (phi dphi) = rho phi^{-2} / Psi
    out = w.inv_phi2 * (1.0 + w.e) / (1.0 - w.e) *
          (1.0 + w.inv_phi2 * (w.vx.square() + w.vy.square())).sqrt();
  }
}

ArrayXXd speed(const SpectralOps& ops, const ArrayXXd& v, int n, DerivativeMode mode) {
  Workspace w;
  ArrayXXd out;
  speed_into(ops, v, n, mode, w, out);
  return out;
}

// Classical RK4 plus the optional filter; result in w.next.
void advance(const SpectralOps& ops, const ArrayXXd& v, double dt, int n,
             const FlowConfig& config, Workspace& w) {
  const auto mode = config.derivatives;
  speed_into(ops, v, n, mode, w, w.k1);
  w.stage = v + (0.5 * dt) * w.k1;
  speed_into(ops, w.stage, n, mode, w, w.k2);
  w.stage = v + (0.5 * dt) * w.k2;
  speed_into(ops, w.stage, n, mode, w, w.k3);
  w.stage = v + dt * w.k3;
  speed_into(ops, w.stage, n, mode, w, w.k4);
  w.stage = v + (dt / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
  if (config.dealias_filter)
    ops.filter_into(w.stage, config.filter_order, w.next);
  else
    w.next = w.stage;
}

}  // namespace

ArrayXXd rhs(const GraphSurface& surface, double phi_floor, DerivativeMode mode) {
  const int n = surface.n();
  if (phi_floor > 0.0 && surface.v().minCoeff() < s_at_phi(phi_floor, n))
    throw FlowDomainError("phi(v) below the floor " + format_number(phi_floor));
  if (!(surface.v().minCoeff() > 0.0))
    throw FlowDomainError("surface touches the central torus");
  return speed(surface.ops(), surface.v(), n, mode);
}

GraphSurface step(const GraphSurface& surface, double dt, const FlowConfig& config) {
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  Workspace w;
  advance(surface.ops(), surface.v(), dt, surface.n(), config, w);
  return surface.with_heights(std::move(w.next));
}

double cfl_dt(const PeriodicGrid& grid, const FlowConfig& config) {
  return config.dt > 0.0 ? config.dt : config.cfl_safety * grid.min_spacing();
}

DiagnosticsRow diagnose(const GraphSurface& surface, double t, double dt, QReport* report,
                        MonitorRow* monitor) {
  const int n = surface.n();
  const SurfaceGeometry geo = analyze(surface);
  const QReport q = q_report(geo);
  DiagnosticsRow row;
  row.t = t;
  row.dt = dt;
  row.q_surface = q.q_surface;
  row.q_flat = q.q_flat;
  row.q_bulk = q.q_bulk;
  row.max_rho2m1 = (geo.rho.square() - 1.0).maxCoeff();
  row.min_phi = geo.phi.minCoeff();
  const ArrayXXd dev = n == 3 ? ArrayXXd(geo.phi - t) : ArrayXXd(geo.phi.square() - 2.0 * t);
  row.height_dev_lo = dev.minCoeff();
  row.height_dev_hi = dev.maxCoeff();
  row.min_eig_conf =
      weingarten_min_eig_field(geo, n == 3 ? ConformalChoice::GTilde : ConformalChoice::GBar)
          .minCoeff();
  if (report) *report = q;
  if (monitor) {
    monitor->t = t;
    monitor->flat_laplacian_term = q.flat_laplacian_term;
    monitor->flat_gradient_term = q.flat_gradient_term;
    monitor->min_hessian_eig = min_hessian_eig(geo);
    const double rate = n == 3 ? t * t : t * std::sqrt(t);
    monitor->hessian_monitor = t > 1.0 ? monitor->min_hessian_eig * rate / std::log(t) : 0.0;
  }
  return row;
}

FlowResult run(const GraphSurface& initial, const FlowConfig& config) {
  config.validate();
  const int n = initial.n();
  const double floor = config.phi_floor > 0.0 ? config.phi_floor : default_phi_floor(n);
  const double s_floor = s_at_phi(floor, n);
  const SpectralOps& ops = initial.ops();
  const double dt0 = cfl_dt(initial.grid(), config);

  FlowResult result;
  auto record = [&](const GraphSurface& s, double t, double dt) {
    MonitorRow m;
    result.rows.push_back(diagnose(s, t, dt, &result.final_report, &m));
    result.monitors.push_back(m);
  };

  ArrayXXd v = initial.v();
  double t = 0.0;
  record(initial, 0.0, 0.0);
  if (v.minCoeff() < s_floor) {
    result.exit = FlowExit::ValidityExit;
    result.message = "initial surface violates the floor phi >= " + format_number(floor);
    result.final_surface = initial;
    return result;
  }

  Workspace work;
  long since_diag = 0;
  while (t < config.t_end) {
    double dt = dt0;
    if (config.land_on_t_end && t + dt > config.t_end) dt = config.t_end - t;
    int attempts = 0;
    for (;;) {
      advance(ops, v, dt, n, config, work);
      if (work.next.allFinite()) break;
      if (++attempts > 8) {
        result.exit = FlowExit::NumericalFailure;
        result.message = "non-finite heights after 8 step halvings at t = " + format_number(t);
        result.final_surface = initial.with_heights(v);
        return result;
      }
      ++result.rejected_steps;
      dt *= 0.5;
    }
    v.swap(work.next);
    t += dt;
    ++result.steps;
    ++since_diag;

    if (v.minCoeff() < s_floor) {
      GraphSurface s = initial.with_heights(v);
      record(s, t, dt);
      result.exit = FlowExit::ValidityExit;
      result.message = "phi(v) dropped below the floor " + format_number(floor) +
                       " at t = " + format_number(t);
      result.final_surface = std::move(s);
      return result;
    }
    const bool done = !(t < config.t_end);
    if (since_diag >= config.diag_every || done) {
      record(initial.with_heights(v), t, dt);
      since_diag = 0;
    }
  }
  result.final_surface = initial.with_heights(std::move(v));
  return result;
}

double ode_comparison_phi(double t, double a) {
  if (!(a > 1.0)) throw DomainError("comparison start value must exceed 1");
  if (!(t >= 0.0)) throw DomainError("time must be non-negative");
  const auto f = [](double x) { return std::sqrt(1.0 - std::pow(x, -3.0)); };
  const long steps = std::max(1L, static_cast<long>(std::ceil(t / 1e-3)));
  const double h = t / static_cast<double>(steps);
  double x = a;
  for (long i = 0; i < steps; ++i) {
    const double k1 = f(x), k2 = f(x + 0.5 * h * k1), k3 = f(x + 0.5 * h * k2),
                 k4 = f(x + h * k3);
    x += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return x;
}

double radial_flow(double t, double s0, int n, double max_step) {
  if (!(s0 > 0.0)) throw DomainError("radial flow needs s0 > 0");
  const long steps = std::max(1L, static_cast<long>(std::ceil(t / max_step)));
  const double h = t / static_cast<double>(steps);
  double s = s0;
  for (long i = 0; i < steps; ++i) {
    const double k1 = flow_speed(s, n), k2 = flow_speed(s + 0.5 * h * k1, n),
                 k3 = flow_speed(s + 0.5 * h * k2, n), k4 = flow_speed(s + h * k3, n);
    s += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return s;
}

double decay_fit(const std::vector<double>& t, const std::vector<double>& values, double t_lo,
                 double t_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi) continue;
    if (!(values[i] > 1e-13))
      throw FitWindowError("max(rho^2 - 1) reached the round-off floor at t = " +
                           format_number(t[i]) + "; use a shorter window");
    const double x = std::log(t[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  if (count < 20)
    throw FitWindowError("fit window holds " + std::to_string(count) +
                         " samples; at least 20 are needed");
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

double decay_fit(const std::vector<DiagnosticsRow>& rows, double t_lo, double t_hi) {
  std::vector<double> t, y;
  for (const auto& r : rows) {
    t.push_back(r.t);
    y.push_back(r.max_rho2m1);
  }
  return decay_fit(t, y, t_lo, t_hi);
}

double height_oscillation(const std::vector<DiagnosticsRow>& rows, double t_lo, double t_hi) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  double lo_min = inf, lo_max = -inf, hi_min = inf, hi_max = -inf;
  for (const auto& r : rows) {
    if (r.t < t_lo || r.t > t_hi) continue;
    lo_min = std::min(lo_min, r.height_dev_lo);
    lo_max = std::max(lo_max, r.height_dev_lo);
    hi_min = std::min(hi_min, r.height_dev_hi);
    hi_max = std::max(hi_max, r.height_dev_hi);
  }
  if (!(lo_max >= lo_min)) throw FitWindowError("no diagnostics rows in the window");
  return std::max(lo_max - lo_min, hi_max - hi_min);
}

double height_spread(const std::vector<DiagnosticsRow>& rows, double t_lo, double t_hi) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : rows) {
    if (r.t < t_lo || r.t > t_hi) continue;
    lo = std::min(lo, r.height_dev_lo);
    hi = std::max(hi, r.height_dev_hi);
  }
  if (!(hi >= lo)) throw FitWindowError("no diagnostics rows in the window");
  return hi - lo;
}

double monotonicity_weight_4d(double phi_value) {
  if (!(phi_value > 1.0)) throw DomainError("phi must exceed 1");
  const double x = std::pow(phi_value, -4.0);
  return (6.0 + 2.0 * x * x) / (1.0 - x);
}

void write_diagnostics_csv(std::ostream& os, const std::vector<DiagnosticsRow>& rows) {
  os << kDiagnosticsHeader << '\n';
  for (const auto& r : rows) {
    for (double x : {r.t, r.q_surface, r.q_flat, r.q_bulk, r.max_rho2m1, r.min_phi,
                     r.height_dev_lo, r.height_dev_hi, r.min_eig_conf})
      os << format_number(x) << ',';
    os << format_number(r.dt) << '\n';
  }
}

void write_monitors_csv(std::ostream& os, const std::vector<MonitorRow>& rows) {
  os << kMonitorsHeader << '\n';
  for (const auto& r : rows)
    os << format_number(r.t) << ',' << format_number(r.flat_laplacian_term) << ','
       << format_number(r.flat_gradient_term) << ',' << format_number(r.min_hessian_eig) << ','
       << format_number(r.hessian_monitor) << '\n';
}

}  // namespace geonflow
