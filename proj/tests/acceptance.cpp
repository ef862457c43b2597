// Acceptance run: one PASS/FAIL line per criterion, plus indented info lines.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "geonflow/curvature_tables.hpp"
#include "geonflow/fd_oracle.hpp"
#include "geonflow/flow_engine.hpp"
#include "geonflow/io.hpp"
#include "geonflow/q_functional.hpp"
#include "geonflow/run_config.hpp"
#include "geonflow/verify.hpp"

using namespace geonflow;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void verdict(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename... Args>
void info(const char* fmt, Args... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

double s_with_phi(double target, int n) { return 2.0 / n * std::acosh(std::pow(target, n / 2.0)); }

GeonParams unit_params(int n) { return GeonParams(n, std::vector<double>(n - 2, 1.0)); }

struct Run {
  std::string label;
  int n = 3;
  double phi0 = 0.0;
  FlowResult result;
  double seconds = 0.0;
};

Run evolve(const std::string& label, const GraphSurface& start, double t_end, int diag_every) {
  FlowConfig c;
  c.t_end = t_end;
  c.diag_every = diag_every;
  Run r;
  r.label = label;
  r.n = start.n();
  r.phi0 = phi(start.v().minCoeff(), start.n());
  const auto t0 = Clock::now();
  r.result = run(start, c);
  r.seconds = seconds_since(t0);
  return r;
}

// Standard perturbed starts at 128^2.
GraphSurface standard_start(int n) {
  const auto p = unit_params(n);
  const auto grid = PeriodicGrid::for_params(p, 128, 128);
  if (n == 3) return mode_surface(p, grid, s_with_phi(2.0, 3), {{0, 1, 0.1, 0.0}});
  return mode_surface(p, grid, s_with_phi(2.0, 4), {{1, 0, 0.05, 0.0}, {0, 1, 0.05, 0.7}});
}

// Shared between criteria 5, 7 and 8.
std::vector<Run> seeded_runs;
std::vector<Run> standard_runs;

void ensure_seeded_runs() {
  if (!seeded_runs.empty()) return;
  for (int k = 0; k < 15; ++k) {
    const int n = k < 10 ? 3 : 4;
    const std::uint64_t seed = 1000 + k;
    std::mt19937_64 rng(seed);
    auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    RunConfig cfg;
    cfg.n = n;
    cfg.n1 = cfg.n2 = 128;
    cfg.seed = seed;
    cfg.init.phi0 = 1.5 + 1.5 * unit();
    cfg.init.random_count = 4;
    cfg.init.random_kmax = 2;
    cfg.init.random_amplitude = 0.02 + 0.08 * unit();
    double scale = 1.0;
    const GraphSurface start = initial_surface(cfg, &scale);
    seeded_runs.push_back(evolve("seed " + std::to_string(seed), start, 50.0, 100));
    const Run& r = seeded_runs.back();
    info("%s n=%d phi0=%.3f amplitude=%.4f: %s, %ld steps, %.1f s", r.label.c_str(), n,
         cfg.init.phi0, cfg.init.random_amplitude * scale,
         std::string(to_string(r.result.exit)).c_str(), r.result.steps, r.seconds);
  }
}

void ensure_standard_runs() {
  if (!standard_runs.empty()) return;
  for (int n : {3, 4}) {
    standard_runs.push_back(evolve("standard n=" + std::to_string(n), standard_start(n), 100.0, 50));
    const Run& r = standard_runs.back();
    info("%s: %s, %ld steps, %.1f s", r.label.c_str(), std::string(to_string(r.result.exit)).c_str(),
         r.result.steps, r.seconds);
  }
}

void criterion1() {
  VerifyOptions o;
  o.samples = 100;
  const auto t0 = Clock::now();
  const auto r = verify_static(o);
  const double sec = seconds_since(t0);
  double tensor = 0.0, scalar = 0.0;
  for (const auto& c : r.checks) {
    if (c.expect_above) continue;
    if (c.name.find("scalar") != std::string::npos)
      scalar = std::max(scalar, c.error);
    else
      tensor = std::max(tensor, c.error);
  }
  info("%zu checks, worst tensor residual %.2e, worst scalar residual %.2e, %.2f s",
       r.checks.size(), tensor, scalar, sec);
  verdict(1, r.passed() && sec < 30.0, "static equation of the geon");
}

void criterion2() {
  VerifyOptions o;
  o.samples = 100;
  const auto t0 = Clock::now();
  const auto r = verify_curvature(o);
  const double sec = seconds_since(t0);
  double margin = 0.0;
  for (const auto& c : r.checks)
    if (c.name.find("sign change") != std::string::npos)
      margin = std::max(margin, c.error);
  info("%zu checks, worst relative error %.2e, sign-margin root error %.2e, %.2f s",
       r.checks.size(), r.max_error("curvature"), margin, sec);
  if (!r.passed())
    for (const auto& c : r.checks)
      if (!c.pass) info("failed: %s at %.4f (error %.2e)", c.name.c_str(), c.position, c.error);
  // the (1 - phi^-4)^2 form of the g_bar i-j entry, against the implemented (3 - phi^-4)^2
  const double p4 = 1.5;
  const auto fd = fd_table(conformal_spec(4, ConformalChoice::GBar), s_with_phi(p4, 4));
  info("g_bar R_ijij at phi=1.5: FD %.6f, implemented %.6f, (1 - phi^-4)^2 form %.6f", fd.ijij,
       gbar_list_4d(p4).ijij, gbar_ijij_as_printed(p4));
  verdict(2, r.passed() && sec < 60.0, "curvature closed forms against the FD oracle");
}

void criterion3() {
  VerifyOptions o;
  o.graphs = 20;
  o.grid = 128;
  const auto t0 = Clock::now();
  const auto r = verify_surface_forms(o);
  const double sec = seconds_since(t0);
  double closed = 0.0, fd = 0.0;
  for (const auto& c : r.checks) {
    if (c.name.find("embedding") != std::string::npos)
      fd = std::max(fd, c.error);
    else
      closed = std::max(closed, c.error);
  }
  info("%zu checks on 20 graphs at 128^2: closed-form pairs %.2e, embedding oracle %.2e, %.2f s",
       r.checks.size(), closed, fd, sec);
  verdict(3, r.passed() && sec < 120.0, "second-fundamental-form routes agree");
}

void criterion4() {
  const auto t0 = Clock::now();
  bool ok = true;
  double worst_bound = 0.0, worst_torus = 0.0;
  for (int n : {3, 4}) {
    const auto p = unit_params(n);
    const double target = bound(p);  // -n m / 2
    const double torus_value = 0.5 * n * mass(p);
    for (double s0 : {0.5, s_with_phi(2.0, n), 3.0}) {
      const auto r = q_report(coordinate_torus(p, PeriodicGrid::for_params(p, 32, 32), s0));
      for (double q : {r.q_surface, r.q_bulk, r.q_flat}) {
        worst_bound = std::max(worst_bound, std::abs(q - target));
        worst_torus = std::max(worst_torus, std::abs(q - torus_value));
        ok = ok && std::abs(q - target) < 1e-8;
      }
    }
  }
  info("max |Q - (-nm/2)| = %.6f over three routes, n=3,4 and three heights", worst_bound);
  info("max |Q - nm/2|    = %.2e (every route returns nm/2 = -2pi)", worst_torus);
  verdict(4, ok && seconds_since(t0) < 10.0, "coordinate tori reach -nm/2 = 2pi");
}

void criterion5() {
  const auto t0 = Clock::now();
  ensure_seeded_runs();
  const double sec = seconds_since(t0);
  bool monotone = true, below = true, close = true, completed = true;
  double worst_drop = 0.0, worst_gap = 0.0, worst_torus_gap = 0.0;
  for (const auto& r : seeded_runs) {
    completed = completed && r.result.exit == FlowExit::Completed;
    const auto& rows = r.result.rows;
    for (std::size_t k = 1; k < rows.size(); ++k)
      worst_drop = std::min(worst_drop, rows[k].q_surface - rows[k - 1].q_surface);
    const double q = rows.back().q_surface;
    const double b = r.result.final_report.bound;
    below = below && q <= b + 1e-8;
    close = close && std::abs(q - b) < 1e-2;
    worst_gap = std::max(worst_gap, std::abs(q - b));
    worst_torus_gap = std::max(worst_torus_gap, std::abs(q - r.result.final_report.torus_value));
  }
  monotone = worst_drop >= -1e-8;
  info("most negative Q increment between diagnostics %.2e", worst_drop);
  info("max |Q_final - (-nm/2)| = %.4f; max |Q_final - nm/2| = %.4f", worst_gap, worst_torus_gap);
  info("monotone %s, below the bound %s, within 1e-2 of the bound %s; %.0f s total",
       monotone ? "yes" : "no", below ? "yes" : "no", close ? "yes" : "no", sec);
  verdict(5, completed && monotone && below && close && sec < 600.0,
          "Q monotone along 15 seeded flows and approaching -nm/2");
}

void criterion6() {
  ensure_standard_runs();
  bool ok = true;
  for (const auto& r : standard_runs) {
    const auto& rows = r.result.rows;
    double slope = std::nan("");
    try {
      slope = decay_fit(rows, 10.0, 100.0);
    } catch (const FitWindowError& e) {
      info("%s: %s", r.label.c_str(), e.what());
    }
    double worst_rise = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k)
      worst_rise = std::max(worst_rise, rows[k].max_rho2m1 - rows[k - 1].max_rho2m1);
    const bool in_window = r.n == 3 ? slope >= -5.0 && slope <= -3.5 : slope >= -4.0 && slope <= -2.5;
    const bool nonincreasing = worst_rise <= 1e-14;
    info("%s: slope %.4f, largest rise of max(rho^2-1) %.2e", r.label.c_str(), slope, worst_rise);
    ok = ok && r.result.exit == FlowExit::Completed && in_window && nonincreasing;
  }
  verdict(6, ok, "decay exponents of max(rho^2 - 1)");
}

void criterion7() {
  ensure_standard_runs();
  bool ok = true;
  for (const auto& r : standard_runs) {
    const double osc = height_oscillation(r.result.rows, 10.0, 100.0);
    info("%s: height drift on [10,100] = %.4f (spread including the initial profile %.4f)",
         r.label.c_str(), osc, height_spread(r.result.rows, 10.0, 100.0));
    ok = ok && osc < 0.5;
  }
  // lower comparison for every n=3 flow at hand
  std::vector<const Run*> runs;
  for (const auto& r : standard_runs)
    if (r.n == 3) runs.push_back(&r);
  for (const auto& r : seeded_runs)
    if (r.n == 3) runs.push_back(&r);
  double worst = std::numeric_limits<double>::infinity();
  for (const Run* r : runs) {
    const auto& rows = r->result.rows;
    double Phi = rows.front().min_phi, t = 0.0;
    for (const auto& row : rows) {
      if (row.t > t) Phi = ode_comparison_phi(row.t - t, Phi);
      t = row.t;
      worst = std::min(worst, row.min_phi - Phi);
    }
  }
  info("min over %zu n=3 flows of min phi(v_t) - Phi(t) = %.3e", runs.size(), worst);
  ok = ok && worst >= -1e-6;
  verdict(7, ok, "height asymptotics and the ODE comparison");
}

void criterion8() {
  ensure_standard_runs();
  ensure_seeded_runs();
  bool ok = true;
  int checked = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto* group : {&standard_runs, &seeded_runs})
    for (const auto& r : *group) {
      const auto& rows = r.result.rows;
      if (rows.front().min_eig_conf < 0.0) continue;
      ++checked;
      for (const auto& row : rows)
        if (row.t <= 50.0) worst = std::min(worst, row.min_eig_conf);
    }
  ok = checked > 0 && worst >= -1e-6;
  info("%d convex starts, smallest Weingarten eigenvalue for t <= 50: %.4e", checked, worst);
  verdict(8, ok, "convexity is preserved");
}

void criterion9() {
  bool ok = true;
  // time order on the coordinate-torus reduction
  const double s0 = s_with_phi(2.0, 3);
  const double exact = radial_flow(2.0, s0, 3, 1e-4);
  const auto p = unit_params(3);
  const auto torus = coordinate_torus(p, PeriodicGrid::for_params(p, 16, 16), s0);
  std::vector<double> errors;
  for (double dt : {0.2, 0.1, 0.05}) {
    FlowConfig c;
    c.t_end = 2.0;
    c.dt = dt;
    c.diag_every = 100000;
    errors.push_back(std::abs(run(torus, c).final_surface->v()(0, 0) - exact));
  }
  const double order_a = std::log2(errors[0] / errors[1]);
  const double order_b = std::log2(errors[1] / errors[2]);
  info("RK4 errors %.2e %.2e %.2e, observed orders %.3f %.3f", errors[0], errors[1], errors[2],
       order_a, order_b);
  ok = ok && std::abs(order_b - 4.0) <= 0.3;

  // Q route spread under grid doubling
  for (int n : {3, 4}) {
    const auto pn = unit_params(n);
    const std::vector<Mode> modes = {{3, 2, 0.04, 0.1}, {1, 4, 0.03, 0.5}, {5, 1, 0.01, 0.9}};
    double spread[2];
    int k = 0;
    for (int N : {24, 48})
      spread[k++] =
          q_report(mode_surface(pn, PeriodicGrid::for_params(pn, N, N), s_with_phi(2.0, n), modes))
              .spread();
    info("n=%d: Q spread %.2e at 24^2, %.2e at 48^2 (ratio %.1f)", n, spread[0], spread[1],
         spread[0] / spread[1]);
    ok = ok && spread[0] >= 4.0 * spread[1];
  }

  // reproducibility
  RunConfig cfg;
  cfg.n1 = cfg.n2 = 64;
  cfg.seed = 77;
  cfg.init.random_count = 5;
  cfg.flow.t_end = 2.0;
  std::string first;
  bool identical = true;
  for (int rep = 0; rep < 2; ++rep) {
    const auto r = run(initial_surface(cfg), cfg.flow);
    std::ostringstream os;
    write_diagnostics_csv(os, r.rows);
    const std::string text = os.str() + surface_to_csv(*r.final_surface);
    if (rep == 0)
      first = text;
    else
      identical = text == first;
  }
  info("identical config and seed reproduce identical CSV bytes: %s", identical ? "yes" : "no");
  ok = ok && identical;
  verdict(9, ok, "numerical hygiene");
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));
  auto want = [&](int id) { return selected.empty() || selected.count(id) > 0; };
  const auto t0 = Clock::now();
  if (want(1)) criterion1();
  if (want(2)) criterion2();
  if (want(3)) criterion3();
  if (want(4)) criterion4();
  if (want(9)) criterion9();
  if (want(5)) criterion5();
  if (want(8)) criterion8();
  if (want(6)) criterion6();
  if (want(7)) criterion7();
  std::printf("%d criterion(s) failed, %.0f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
