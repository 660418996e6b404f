#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "sphgrav/diagnostics.hpp"
#include "sphgrav/riemann.hpp"

namespace sphgrav::cli {

/// Column order of every snapshot file.
inline constexpr const char *snapshot_header = "x,rho,m,vrho,omega,w,z,phi_x";

/// Doubles are written with 17 significant digits so they round-trip.
[[nodiscard]] std::string format_double(double v);

/// One row per cell at its centre.
void write_snapshot_csv(std::ostream &out, const CellArray &cells, int N);
void write_snapshot_csv(const std::filesystem::path &path, const CellArray &cells, int N);

/// Rebuilds a cell array from a snapshot file. The layout (parity) is
/// recovered by matching the cell centres against both staggered layouts
/// for the given mesh; throws ConfigError if neither matches.
[[nodiscard]] CellArray read_snapshot_csv(const std::filesystem::path &path, int K, double l);

[[nodiscard]] nlohmann::json to_json(const BoundReport &b);
[[nodiscard]] nlohmann::json to_json(const MassLedger &m);
[[nodiscard]] nlohmann::json to_json(const DiagnosticsReport &r, bool with_residuals = true);
[[nodiscard]] nlohmann::json to_json(const WaveFan &fan);

/// Writes pretty JSON followed by a newline.
void write_json(const std::filesystem::path &path, const nlohmann::json &j);

/// Human-readable wave structure of a fan.
void describe_fan(std::ostream &out, const WaveFan &fan);

} // namespace sphgrav::cli
