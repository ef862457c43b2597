#include "geonflow/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "geonflow/errors.hpp"

namespace geonflow {

using nlohmann::json;

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::system_error(errno, std::generic_category(), "cannot write " + tmp.string());
    os << contents;
    if (!os) throw std::system_error(errno, std::generic_category(), "write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string surface_to_csv(const GraphSurface& surface) {
  const auto& g = surface.grid();
  json header = {{"format", "geonflow-surface"},
                 {"version", 1},
                 {"n", surface.n()},
                 {"periods", surface.params().periods()},
                 {"grid", {g.n1(), g.n2()}},
                 {"axes", {to_string(g.label(0)), to_string(g.label(1))}},
                 {"axis_periods", {g.period(0), g.period(1)}}};
  std::string out = "# " + header.dump() + "\nx,y,v\n";
  const auto& v = surface.v();
  for (int j = 0; j < g.n2(); ++j)
    for (int i = 0; i < g.n1(); ++i) {
      out += format_number(g.spacing(0) * i);
      out += ',';
      out += format_number(g.spacing(1) * j);
      out += ',';
      out += format_number(v(i, j));
      out += '\n';
    }
  return out;
}

namespace {

double parse_double(const std::string& text, int line) {
  double x = 0.0;
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, x);
  if (res.ec != std::errc() || res.ptr != end)
    throw ConfigError("not a number: '" + text + "'", line);
  return x;
}

}  // namespace

GraphSurface surface_from_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0)
    throw ConfigError("surface file must start with a '# {json}' header", 1);
  json header;
  try {
    header = json::parse(line.substr(2));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad surface header: ") + e.what(), 1);
  }
  int n = 0, n1 = 0, n2 = 0;
  std::vector<double> periods;
  try {
    n = header.at("n").get<int>();
    periods = header.at("periods").get<std::vector<double>>();
    n1 = header.at("grid").at(0).get<int>();
    n2 = header.at("grid").at(1).get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("incomplete surface header: ") + e.what(), 1);
  }
  const GeonParams params(n, periods);
  const PeriodicGrid grid = PeriodicGrid::for_params(params, n1, n2);
  if (!std::getline(is, line) || line != "x,y,v") throw ConfigError("expected 'x,y,v' columns", 2);

  Eigen::ArrayXXd v(n1, n2);
  int row = 0, lineno = 2;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (row >= n1 * n2) throw ConfigError("more rows than grid nodes", lineno);
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw ConfigError("expected three columns", lineno);
    v(row % n1, row / n1) = parse_double(line.substr(c2 + 1), lineno);
    ++row;
  }
  if (row != n1 * n2) throw ConfigError("fewer rows than grid nodes", lineno);
  return GraphSurface(params, grid, std::move(v));
}

GraphSurface read_surface(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::system_error(errno, std::generic_category(), "cannot read " + path.string());
  return surface_from_csv(is);
}

std::string q_report_json(const QReport& r, const GeonParams& params) {
  json j = {{"n", params.n()},
            {"periods", params.periods()},
            {"mass", mass(params)},
            {"q_surface", r.q_surface},
            {"q_bulk", r.q_bulk},
            {"q_flat", r.q_flat},
            {"spread", r.spread()},
            {"bound", r.bound},
            {"torus_value", r.torus_value},
            {"gap_to_bound", r.bound - r.q_surface},
            {"gap_to_torus_value", r.torus_value - r.q_surface},
            {"flat_laplacian_term", r.flat_laplacian_term},
            {"flat_gradient_term", r.flat_gradient_term}};
  return j.dump(2) + "\n";
}

}  // namespace geonflow
