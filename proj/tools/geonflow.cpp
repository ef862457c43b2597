// geonflow command-line driver: simulate, verify, sweep, torus-exact.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geonflow/errors.hpp"
#include "geonflow/flow_engine.hpp"
#include "geonflow/io.hpp"
#include "geonflow/q_functional.hpp"
#include "geonflow/run_config.hpp"
#include "geonflow/verify.hpp"

namespace fs = std::filesystem;
using namespace geonflow;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitValidity = 2;
constexpr int kExitUsage = 64;

struct CommonFlags {
  std::string config;
  std::string out;
  std::string grid;
  long long seed = -1;
  double t_end = 0.0;
  bool allow_unsafe = false;
};

// Config file plus command-line overrides; any problem is a ConfigError.
RunConfig load_config(const CommonFlags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : parse_config_file(f.config);
  auto apply = [&c](const std::string& key, const std::string& value, const char* flag) {
    try {
      set_option(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(flag) + ": " + e.what());
    }
    c.lines.erase(key);
  };
  if (!f.out.empty()) apply("output.dir", f.out, "--out");
  if (!f.grid.empty()) apply("grid", f.grid, "--grid");
  if (f.seed >= 0) apply("seed", std::to_string(f.seed), "--seed");
  if (f.t_end != 0.0) apply("flow.t_end", format_number(f.t_end), "--t-end");
  c.validate();
  return c;
}

int worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GEONFLOW_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap >= 1)
      n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    else
      std::cerr << "warning: ignoring GEONFLOW_THREADS='" << env << "'\n";
  }
  return static_cast<int>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

std::string csv_text(const std::vector<DiagnosticsRow>& rows) {
  std::ostringstream os;
  write_diagnostics_csv(os, rows);
  return os.str();
}

std::string monitors_text(const std::vector<MonitorRow>& rows) {
  std::ostringstream os;
  write_monitors_csv(os, rows);
  return os.str();
}

double fitted_decay(const FlowResult& r) {
  if (r.rows.empty()) return std::nan("");
  const double t_end = r.rows.back().t;
  try {
    return decay_fit(r.rows, std::max(1.0, 0.1 * t_end), t_end);
  } catch (const std::exception&) {
    return std::nan("");
  }
}

struct SimulationOutcome {
  int exit_code = kExitOk;
  FlowResult result;
  InitialCheck check;
  std::string error;
};

// Runs one configured flow and writes its artifacts into config.output_dir.
SimulationOutcome simulate(const RunConfig& config, bool allow_unsafe, bool verbose) {
  SimulationOutcome out;
  double scale = 1.0;
  const GraphSurface initial = initial_surface(config, &scale);
  out.check = check_initial(initial, config.flow.phi_floor);
  if (!out.check.ok && !allow_unsafe) {
    out.exit_code = kExitValidity;
    out.error = "initial data rejected: " + out.check.reason + " (use --allow-unsafe to override)";
    return out;
  }
  out.result = run(initial, config.flow);
  const FlowResult& r = out.result;

  const fs::path dir = config.output_dir;
  const std::string p = config.output_prefix;
  write_file_atomic(dir / (p + "diagnostics.csv"), csv_text(r.rows));
  write_file_atomic(dir / (p + "monitors.csv"), monitors_text(r.monitors));
  if (r.final_surface) write_file_atomic(dir / (p + "surface.csv"), surface_to_csv(*r.final_surface));

  json report = json::parse(q_report_json(r.final_report, config.params()));
  report["exit"] = std::string(to_string(r.exit));
  report["message"] = r.message;
  report["t_final"] = r.rows.empty() ? 0.0 : r.rows.back().t;
  report["steps"] = r.steps;
  report["rejected_steps"] = r.rejected_steps;
  report["seed"] = config.seed;
  report["grid"] = {config.n1, config.n2};
  report["initial_min_phi"] = out.check.min_phi;
  report["initial_min_eig_conf"] = out.check.min_eig_conf;
  report["initial_checks_passed"] = out.check.ok;
  report["random_amplitude_scale"] = scale;
  write_file_atomic(dir / (p + "q_report.json"), report.dump(2) + "\n");

  if (verbose) {
    std::cout << "exit: " << to_string(r.exit) << " after " << r.steps << " steps";
    if (!r.rows.empty()) std::cout << ", t = " << format_number(r.rows.back().t);
    std::cout << "\nQ (surface) = " << format_number(r.final_report.q_surface)
              << "\nbound -nm/2 = " << format_number(r.final_report.bound)
              << "\ntorus value nm/2 = " << format_number(r.final_report.torus_value)
              << "\nartifacts in " << dir.string() << "\n";
    if (!r.message.empty()) std::cout << r.message << "\n";
  }
  out.exit_code = r.exit == FlowExit::Completed ? kExitOk : kExitValidity;
  return out;
}

int cmd_simulate(const CommonFlags& flags) {
  RunConfig config;
  try {
    config = load_config(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  const SimulationOutcome o = simulate(config, flags.allow_unsafe, true);
  if (!o.error.empty()) std::cerr << o.error << "\n";
  return o.exit_code;
}

int cmd_verify(const std::string& scope, const CommonFlags& flags, bool inject_fault,
               int samples, int graphs) {
  VerifyOptions opt;
  opt.inject_sign_fault = inject_fault;
  if (samples > 0) opt.samples = samples;
  if (graphs > 0) opt.graphs = graphs;
  if (!flags.grid.empty()) {
    RunConfig probe;
    try {
      set_option(probe, "grid", flags.grid);
    } catch (const ConfigError& e) {
      std::cerr << "--grid: " << e.what() << "\n";
      return kExitUsage;
    }
    if (probe.n1 != probe.n2 || probe.n1 < 16 || probe.n1 % 2) {
      std::cerr << "--grid: verify needs an even square grid of at least 16x16\n";
      return kExitUsage;
    }
    opt.grid = probe.n1;
  }
  if (flags.seed >= 0) opt.seed = static_cast<std::uint64_t>(flags.seed);

  VerifyReport report;
  if (scope == "curvature")
    report = verify_curvature(opt);
  else if (scope == "static")
    report = verify_static(opt);
  else if (scope == "surface-forms")
    report = verify_surface_forms(opt);
  else
    report = verify_all(opt);

  const std::string text = report.to_json();
  if (flags.out.empty())
    std::cout << text;
  else
    write_file_atomic(fs::path(flags.out) / ("verify_" + scope + ".json"), text);
  std::cerr << "verify " << scope << ": " << report.checks.size() << " checks, "
            << report.failures() << " failed\n";
  return report.passed() ? kExitOk : kExitVerifyFailed;
}

int cmd_sweep(const CommonFlags& flags, const std::vector<std::string>& vary) {
  RunConfig base;
  try {
    base = load_config(flags);
    for (const auto& item : vary) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("--vary expects key=v1|v2|...");
      set_option(base, "sweep." + item.substr(0, eq), item.substr(eq + 1));
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (base.sweep.empty()) {
    std::cerr << "config error: sweep needs at least one sweep.* key or --vary\n";
    return kExitUsage;
  }

  // Cartesian product, last key fastest.
  struct Job {
    RunConfig config;
    std::string overrides;
    std::string error;
  };
  std::vector<Job> jobs(1, Job{base, "", ""});
  for (const auto& [key, values] : base.sweep) {
    std::vector<Job> next;
    for (const auto& job : jobs)
      for (const auto& value : values) {
        Job j = job;
        try {
          set_option(j.config, key, value);
          j.config.validate();
        } catch (const ConfigError& e) {
          j.error = e.what();
        }
        j.overrides += (j.overrides.empty() ? "" : ";") + key + "=" + value;
        next.push_back(std::move(j));
      }
    jobs = std::move(next);
  }

  const fs::path root = base.output_dir;
  std::vector<SimulationOutcome> outcomes(jobs.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t k = cursor++; k < jobs.size(); k = cursor++) {
      if (!jobs[k].error.empty()) continue;
      char name[32];
      std::snprintf(name, sizeof name, "run_%03zu", k);
      jobs[k].config.output_dir = (root / name).string();
      jobs[k].config.output_prefix.clear();
      try {
        outcomes[k] = simulate(jobs[k].config, flags.allow_unsafe, false);
        if (!outcomes[k].error.empty()) jobs[k].error = outcomes[k].error;
      } catch (const std::exception& e) {
        jobs[k].error = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const int workers = worker_count(jobs.size());
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  std::string csv =
      "run,overrides,status,steps,t_final,q_final,bound,torus_value,gap_to_bound,"
      "gap_to_torus_value,q_spread,decay_exponent\n";
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const auto& r = outcomes[k].result;
    std::string status = jobs[k].error.empty() ? std::string(to_string(r.exit)) : "error";
    std::string overrides = jobs[k].overrides;
    std::replace(overrides.begin(), overrides.end(), ',', ' ');
    csv += std::to_string(k) + "," + overrides + "," + status;
    if (!jobs[k].error.empty() || r.rows.empty()) {
      csv += ",,,,,,,,,\n";
      if (!jobs[k].error.empty())
        std::cerr << "run " << k << " (" << jobs[k].overrides << "): " << jobs[k].error << "\n";
      continue;
    }
    const QReport& q = r.final_report;
    for (double x : {static_cast<double>(r.steps), r.rows.back().t, q.q_surface, q.bound,
                     q.torus_value, q.bound - q.q_surface, q.torus_value - q.q_surface,
                     q.spread(), fitted_decay(r)})
      csv += "," + format_number(x);
    csv += "\n";
  }
  write_file_atomic(root / (base.output_prefix + "sweep_summary.csv"), csv);
  std::cout << jobs.size() << " runs, summary in "
            << (root / (base.output_prefix + "sweep_summary.csv")).string() << "\n";
  return kExitOk;
}

int cmd_torus_exact(const CommonFlags& flags, int n, const std::vector<double>& periods,
                    double phi0, double s0) {
  RunConfig config;
  try {
    config = load_config(flags);
    if (n != 0) set_option(config, "n", std::to_string(n));
    if (!periods.empty()) {
      std::string text;
      for (double a : periods) text += (text.empty() ? "" : ",") + format_number(a);
      set_option(config, "periods", text);
    }
    if (phi0 != 0.0) {
      config.lines.erase("init.s0");
      config.init.s0 = 0.0;
      set_option(config, "init.phi0", format_number(phi0));
    } else if (s0 != 0.0) {
      config.lines.erase("init.phi0");
      config.init.phi0 = 0.0;
      set_option(config, "init.s0", format_number(s0));
    }
    config.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  }
  const TorusExact t = torus_exact(config.params(), config.start_height());
  const json j = {{"n", config.n},          {"periods", config.params().periods()},
                  {"s0", t.s0},             {"phi", t.phi},
                  {"mean_curvature", t.mean_curvature},
                  {"q", t.q},               {"bulk_term", t.bulk_term},
                  {"mass", t.mass},         {"bound", t.bound}};
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "run configuration (key = value)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "random seed for generated initial data")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--grid", f.grid, "grid size N1xN2");
  cmd->add_option("--t-end", f.t_end, "final flow time");
  cmd->add_flag("--allow-unsafe", f.allow_unsafe, "run even if the initial data fails the checks");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted normal flows of toroidal graphs in the Horowitz-Myers geon"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* sim = app.add_subcommand("simulate", "run one flow and write diagnostics");
  add_common(sim, flags);

  auto* ver = app.add_subcommand("verify", "compare closed forms with independent oracles");
  std::string scope = "all";
  bool inject = false;
  int samples = 0, graphs = 0;
  ver->add_option("scope", scope, "curvature | static | surface-forms | all")
      ->check(CLI::IsMember({"curvature", "static", "surface-forms", "all"}));
  ver->add_option("--samples", samples, "random radial positions per dimension");
  ver->add_option("--graphs", graphs, "random graphs for the surface suite");
  ver->add_flag("--inject-fault", inject, "flip one closed-form sign (harness self-test)");
  add_common(ver, flags);

  auto* sweep = app.add_subcommand("sweep", "run a cartesian grid of configurations");
  std::vector<std::string> vary;
  sweep->add_option("--vary", vary, "key=v1|v2|... (repeatable)");
  add_common(sweep, flags);

  auto* torus = app.add_subcommand("torus-exact", "closed-form data of a coordinate torus");
  int n = 0;
  std::vector<double> periods;
  double phi0 = 0.0, s0 = 0.0;
  torus->add_option("--n", n, "dimension (3 or 4)");
  torus->add_option("--periods", periods, "torus periods a_i")->delimiter(',');
  auto* phi_opt = torus->add_option("--phi0", phi0, "phi at the torus");
  torus->add_option("--s0", s0, "radial position of the torus")->excludes(phi_opt);
  add_common(torus, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*sim) return cmd_simulate(flags);
    if (*ver) return cmd_verify(scope, flags, inject, samples, graphs);
    if (*sweep) return cmd_sweep(flags, vary);
    if (*torus) return cmd_torus_exact(flags, n, periods, phi0, s0);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidity;
  }
  return kExitUsage;
}
