#pragma once

// Flat key=value run configuration.
//
//   # comment
//   n = 3
//   periods = 1            # a_3 (,a_4)
//   grid = 128x128
//   init.phi0 = 2          # or init.s0
//   init.modes = 1:0:0.05:0; 0:2:0.03:1.2     # k1:k2:amplitude:phase, ';'-separated
//   init.random.count = 4
//   flow.t_end = 50
//   sweep.init.random.amplitude = 0.02 | 0.05 | 0.1
//
// Unknown keys, duplicates and malformed values are errors carrying the line number.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "geonflow/flow_engine.hpp"
#include "geonflow/graph_surface.hpp"

namespace geonflow {

struct InitialSpec {
  double phi0 = 0.0;  // > 1 selects s0 from phi(s0) = phi0
  double s0 = 0.0;    // > 0 wins when phi0 is unset
  std::vector<Mode> modes;
  int random_count = 0;
  int random_kmax = 2;
  double random_amplitude = 0.05;  // bound on sum |A_k| of the generated modes
  bool require_convex = true;
};

struct RunConfig {
  int n = 3;
  std::vector<double> periods;  // empty = all ones
  int n1 = 64, n2 = 64;
  InitialSpec init;
  FlowConfig flow;
  std::string output_dir = "out";
  std::string output_prefix;
  std::uint64_t seed = 1;
  /// key -> list of alternative values (sweep.* keys with the prefix stripped).
  std::vector<std::pair<std::string, std::vector<std::string>>> sweep;
  /// Line on which each key was set, for error reporting.
  std::map<std::string, int> lines;

  GeonParams params() const;
  PeriodicGrid grid() const;
  /// Starting height s0 resolved from phi0 / s0 (default phi0 = 2).
  double start_height() const;
  /// Cross-key checks; throws ConfigError pointing at the offending key's line.
  void validate() const;
};

/// Sets one key; throws ConfigError (without line) on unknown keys or bad values.
void set_option(RunConfig& config, const std::string& key, const std::string& value);

RunConfig parse_config(std::istream& is);
RunConfig parse_config_file(const std::filesystem::path& path);

/// Modes drawn from a mt19937_64 stream seeded with `seed`.
std::vector<Mode> random_modes(std::uint64_t seed, int count, int kmax, double amplitude);

struct InitialCheck {
  double min_phi = 0.0;
  double phi_floor = 0.0;
  double min_eig_conf = 0.0;
  bool ok = false;
  std::string reason;
};

/// Flow assumptions: phi(v) above the floor and a convex start in g_tilde (n=3) / g_bar (n=4).
InitialCheck check_initial(const GraphSurface& surface, double phi_floor);

/// Initial surface from the config. Random modes are halved until the start is convex when
/// init.require_convex is set; explicit modes are taken as given. The factor applied to the
/// random amplitudes is stored in `random_scale` when given.
GraphSurface initial_surface(const RunConfig& config, double* random_scale = nullptr);

}  // namespace geonflow
