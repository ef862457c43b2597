#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "geonflow/graph_surface.hpp"
#include "geonflow/q_functional.hpp"

namespace geonflow {

/// Shortest decimal string that round-trips to the same double.
std::string format_number(double x);

/// Writes `contents` to a temporary sibling of `path` and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// Surface file: a first line "# {json header}" with n, periods, grid sizes, axis labels and
/// axis periods, then "x,y,v" and one row per node (first axis fastest).
std::string surface_to_csv(const GraphSurface& surface);
GraphSurface surface_from_csv(std::istream& is);
GraphSurface read_surface(const std::filesystem::path& path);

std::string q_report_json(const QReport& report, const GeonParams& params);

}  // namespace geonflow
