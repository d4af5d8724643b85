#pragma once

#include "expreg/experiments.hpp"
#include "expreg/grid.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace expreg {

using Json = nlohmann::json;

/// Writes `<stem>.bin` (flat little-endian float64, row-major, axis 0 slowest)
/// and `<stem>.json` (grid sidecar merged with `extra`).
void write_field(const std::filesystem::path& stem, const GridFunction& u, const Json& extra = Json::object());

/// Reads a field written by write_field. `path` may be the stem, the .bin or the .json.
GridFunction read_field(const std::filesystem::path& path);

/// Sidecar contents for a grid.
Json grid_sidecar(const Grid& grid);

/// Shortest round-tripping decimal form of a double.
std::string format_double(double v);

/// experiment_id,R,L,T,method,error,iterations,residual,seconds
inline constexpr const char* report_csv_header = "experiment_id,R,L,T,method,error,iterations,residual,seconds";
void write_report_csv(const std::filesystem::path& path, const ErrorReport& report);

Json fits_to_json(const ErrorReport& report);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

} // namespace expreg
