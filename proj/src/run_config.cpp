#include "geonflow/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "geonflow/errors.hpp"

namespace geonflow {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, x);
  if (text.empty() || r.ec != std::errc() || r.ptr != end || !std::isfinite(x))
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long x = 0;
  const char* end = text.data() + text.size();
  const auto r = std::from_chars(text.data(), end, x);
  if (text.empty() || r.ec != std::errc() || r.ptr != end)
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  return x;
}

int to_int(const std::string& key, const std::string& text) {
  const long long x = to_integer(key, text);
  if (x < -1000000000LL || x > 1000000000LL) throw ConfigError(key + ": integer out of range");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "on" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "off" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": expected true/false, got '" + text + "'");
}

std::vector<Mode> parse_modes(const std::string& key, const std::string& text) {
  std::vector<Mode> modes;
  if (text.empty()) return modes;
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto f = split(item, ':');
    if (f.size() != 3 && f.size() != 4)
      throw ConfigError(key + ": mode '" + item + "' is not k1:k2:amplitude[:phase]");
    Mode m;
    m.k1 = to_int(key, f[0]);
    m.k2 = to_int(key, f[1]);
    m.amplitude = to_double(key, f[2]);
    m.phase = f.size() == 4 ? to_double(key, f[3]) : 0.0;
    modes.push_back(m);
  }
  return modes;
}

// Uniform double in [0, 1) from the top 53 bits, independent of the library's distributions.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

GeonParams RunConfig::params() const {
  if (periods.empty()) return GeonParams(n, std::vector<double>(n - 2, 1.0));
  return GeonParams(n, periods);
}

PeriodicGrid RunConfig::grid() const { return PeriodicGrid::for_params(params(), n1, n2); }

double RunConfig::start_height() const {
  if (init.phi0 > 0.0) return 2.0 / n * std::acosh(std::pow(init.phi0, 0.5 * n));
  if (init.s0 > 0.0) return init.s0;
  return 2.0 / n * std::acosh(std::pow(2.0, 0.5 * n));
}

void RunConfig::validate() const {
  auto fail = [this](const std::string& key, const std::string& msg) {
    const auto it = lines.find(key);
    throw ConfigError(msg, it == lines.end() ? 0 : it->second);
  };
  if (n != 3 && n != 4) fail("n", "n must be 3 or 4");
  if (!periods.empty() && static_cast<int>(periods.size()) != n - 2)
    fail("periods", "periods needs exactly " + std::to_string(n - 2) + " entries for n = " +
                        std::to_string(n));
  for (double a : periods)
    if (!(a > 0.0)) fail("periods", "periods must be positive");
  if (n1 < 16 || n2 < 16 || n1 % 2 || n2 % 2) fail("grid", "grid sizes must be even and >= 16");
  if (lines.count("init.phi0") && lines.count("init.s0"))
    fail("init.s0", "set only one of init.phi0 and init.s0");
  if (lines.count("init.phi0") && !(init.phi0 > 1.0)) fail("init.phi0", "init.phi0 must exceed 1");
  if (lines.count("init.s0") && !(init.s0 > 0.0)) fail("init.s0", "init.s0 must be positive");
  if (init.random_count < 0) fail("init.random.count", "init.random.count must be >= 0");
  if (init.random_kmax < 1) fail("init.random.kmax", "init.random.kmax must be >= 1");
  if (!(init.random_amplitude >= 0.0))
    fail("init.random.amplitude", "init.random.amplitude must be >= 0");
  try {
    flow.validate();
  } catch (const DomainError& e) {
    fail("flow.t_end", e.what());
  }
}

void set_option(RunConfig& c, const std::string& key, const std::string& value) {
  if (key.rfind("sweep.", 0) == 0) {
    const std::string target = key.substr(6);
    std::vector<std::string> alternatives;
    for (const auto& alt : split(value, '|')) {
      RunConfig probe = c;
      set_option(probe, target, alt);
      alternatives.push_back(alt);
    }
    if (alternatives.empty()) throw ConfigError(key + ": no values");
    for (auto& entry : c.sweep)
      if (entry.first == target) {
        entry.second = std::move(alternatives);
        return;
      }
    c.sweep.emplace_back(target, std::move(alternatives));
    return;
  }
  if (key == "n") {
    c.n = to_int(key, value);
  } else if (key == "periods") {
    c.periods.clear();
    for (const auto& p : split(value, ',')) c.periods.push_back(to_double(key, p));
  } else if (key == "grid") {
    const auto x = value.find('x');
    if (x == std::string::npos) throw ConfigError("grid: expected N1xN2, got '" + value + "'");
    c.n1 = to_int(key, trim(value.substr(0, x)));
    c.n2 = to_int(key, trim(value.substr(x + 1)));
  } else if (key == "seed") {
    const long long s = to_integer(key, value);
    if (s < 0) throw ConfigError("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "init.phi0") {
    c.init.phi0 = to_double(key, value);
  } else if (key == "init.s0") {
    c.init.s0 = to_double(key, value);
  } else if (key == "init.modes") {
    c.init.modes = parse_modes(key, value);
  } else if (key == "init.random.count") {
    c.init.random_count = to_int(key, value);
  } else if (key == "init.random.kmax") {
    c.init.random_kmax = to_int(key, value);
  } else if (key == "init.random.amplitude") {
    c.init.random_amplitude = to_double(key, value);
  } else if (key == "init.require_convex") {
    c.init.require_convex = to_bool(key, value);
  } else if (key == "flow.t_end") {
    c.flow.t_end = to_double(key, value);
  } else if (key == "flow.cfl_safety") {
    c.flow.cfl_safety = to_double(key, value);
  } else if (key == "flow.filter") {
    c.flow.dealias_filter = to_bool(key, value);
  } else if (key == "flow.filter_order") {
    c.flow.filter_order = to_int(key, value);
  } else if (key == "flow.phi_floor") {
    c.flow.phi_floor = to_double(key, value);
  } else if (key == "flow.diag_every") {
    c.flow.diag_every = to_int(key, value);
  } else if (key == "flow.dt") {
    c.flow.dt = to_double(key, value);
  } else if (key == "flow.derivatives") {
    if (value == "spectral")
      c.flow.derivatives = DerivativeMode::Spectral;
    else if (value == "fd4")
      c.flow.derivatives = DerivativeMode::FiniteDifference4;
    else
      throw ConfigError("flow.derivatives: expected spectral or fd4, got '" + value + "'");
  } else if (key == "output.dir") {
    if (value.empty()) throw ConfigError("output.dir must not be empty");
    c.output_dir = value;
  } else if (key == "output.prefix") {
    c.output_prefix = value;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

RunConfig parse_config(std::istream& is) {
  RunConfig c;
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", lineno);
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", lineno);
    if (c.lines.count(key)) throw ConfigError("duplicate key '" + key + "'", lineno);
    try {
      set_option(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.what(), lineno);
    }
    c.lines[key] = lineno;
  }
  c.validate();
  return c;
}

RunConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  return parse_config(is);
}

std::vector<Mode> random_modes(std::uint64_t seed, int count, int kmax, double amplitude) {
  std::mt19937_64 rng(seed);
  std::vector<Mode> modes;
  std::vector<double> weights;
  const auto span = static_cast<std::uint64_t>(2 * kmax + 1);
  while (static_cast<int>(modes.size()) < count) {
    Mode m;
    m.k1 = static_cast<int>(rng() % span) - kmax;
    m.k2 = static_cast<int>(rng() % span) - kmax;
    const double w = 0.2 + 0.8 * unit(rng);
    m.phase = 2.0 * std::numbers::pi * unit(rng);
    if (m.k1 == 0 && m.k2 == 0) continue;
    modes.push_back(m);
    weights.push_back(w);
  }
  double total = 0.0;
  for (double w : weights) total += w;
  for (std::size_t k = 0; k < modes.size(); ++k) modes[k].amplitude = amplitude * weights[k] / total;
  return modes;
}

InitialCheck check_initial(const GraphSurface& surface, double phi_floor) {
  InitialCheck c;
  const int n = surface.n();
  c.phi_floor = phi_floor > 0.0 ? phi_floor : default_phi_floor(n);
  const double vmin = surface.v().minCoeff();
  if (!(vmin > 0.0)) {
    c.reason = "surface touches the central torus";
    return c;
  }
  c.min_phi = phi(vmin, n);
  c.min_eig_conf = weingarten_min_eig(
      surface, n == 3 ? ConformalChoice::GTilde : ConformalChoice::GBar);
  if (c.min_phi < c.phi_floor) {
    c.reason = "min phi(v) = " + std::to_string(c.min_phi) + " below floor " +
               std::to_string(c.phi_floor);
  } else if (c.min_eig_conf < 0.0) {
    c.reason = "initial surface is not convex (min Weingarten eigenvalue " +
               std::to_string(c.min_eig_conf) + ")";
  } else {
    c.ok = true;
  }
  return c;
}

GraphSurface initial_surface(const RunConfig& config, double* random_scale) {
  const GeonParams params = config.params();
  const PeriodicGrid grid = config.grid();
  const double s0 = config.start_height();
  std::vector<Mode> random;
  if (config.init.random_count > 0)
    random = random_modes(config.seed, config.init.random_count, config.init.random_kmax,
                          config.init.random_amplitude);
  auto build = [&](double scale) {
    std::vector<Mode> modes = config.init.modes;
    for (Mode m : random) {
      m.amplitude *= scale;
      modes.push_back(m);
    }
    return mode_surface(params, grid, s0, modes);
  };
  GraphSurface surface = build(1.0);
  double scale = 1.0;
  if (!random.empty() && config.init.require_convex)
    for (int k = 0; k < 30 && !check_initial(surface, config.flow.phi_floor).ok; ++k) {
      scale *= 0.5;
      surface = build(scale);
    }
  if (random_scale) *random_scale = scale;
  return surface;
}

}  // namespace geonflow
