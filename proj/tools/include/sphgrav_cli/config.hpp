#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sphgrav/scheme.hpp"

namespace sphgrav::cli {

/// How the initial data are generated.
enum class InitialKind { floor, gaussian_bump, table };

struct InitialSpec {
  InitialKind kind = InitialKind::floor;
  // gaussian_bump: rho0 = amplitude * exp(-((x - center)/width)^2) * x^{1-N} + offset,
  // m0 = velocity * rho0.
  double amplitude = 0.5;
  double center = 3.0;
  double width = 1.0;
  double offset = 0.0;
  double velocity = 0.0;
  /// table: CSV with columns x, rho, m.
  std::filesystem::path file;
};

/// Everything a config file can set, after defaults, file values and
/// environment overrides are merged.
struct RunConfig {
  SchemeConfig scheme;
  InitialSpec initial;
  std::vector<double> snapshot_times;
  std::optional<double> trace_eps;
  std::vector<double> xi_grid;
  std::vector<double> levels;
  double slack = 1.0;
  /// Resolved key/value pairs as they were read, for the manifest.
  std::map<std::string, std::string> resolved;
};

/// Maps a config key to its environment variable: "initial.amplitude" ->
/// "SPHGRAV_INITIAL_AMPLITUDE".
[[nodiscard]] std::string env_name(const std::string &key);

using EnvLookup = std::function<std::optional<std::string>(const std::string &)>;

/// Reads process environment variables.
[[nodiscard]] EnvLookup process_env();

/// Parses flat `key = value` text. Values are numbers, booleans, quoted or
/// bare strings, or `[a, b, ...]` arrays of numbers. `#` starts a comment.
/// Throws ConfigError on syntax errors, unknown keys or bad values.
[[nodiscard]] RunConfig parse_config(const std::string &text, const EnvLookup &env,
                                     const std::filesystem::path &base_dir = {});

/// Throws ConfigError naming the path if it cannot be read.
[[nodiscard]] RunConfig load_config(const std::filesystem::path &path, const EnvLookup &env);

/// Linear interpolation of tabulated (x, rho, m); zero beyond the last row.
struct InitialTable {
  std::vector<double> x;
  std::vector<double> rho;
  std::vector<double> m;

  [[nodiscard]] double rho_at(double s) const;
  [[nodiscard]] double m_at(double s) const;
};

[[nodiscard]] InitialTable load_initial_table(const std::filesystem::path &path);

/// Fills scheme.rho0 / scheme.m0 from config.initial.
void bind_initial_data(RunConfig &config);

} // namespace sphgrav::cli
