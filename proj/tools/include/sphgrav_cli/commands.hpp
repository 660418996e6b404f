#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sphgrav/diagnostics.hpp"
#include "sphgrav_cli/config.hpp"

namespace sphgrav::cli {

/// Process exit codes.
enum ExitCode : int {
  exit_ok = 0,
  exit_check_failed = 1,
  exit_config = 2,
  exit_cfl = 3,
  exit_monitor = 4,
};

/// A finished run together with its diagnostics.
struct RunOutput {
  RunResult result;
  DiagnosticsReport report;
  /// False when the standard test bump does not fit inside the run's
  /// space-time domain; residuals are then not reported.
  bool residuals_valid = false;
};

/// Binds the initial data, runs the scheme and collects diagnostics.
[[nodiscard]] RunOutput execute(RunConfig config, const std::vector<double> &snapshot_times = {});

/// Mean density of `fine` over each interval of `edges`, computed exactly
/// from the piecewise-constant cell averages.
[[nodiscard]] std::vector<double> reaverage_density(const CellArray &fine, const std::vector<double> &edges);

/// sum_k width_k |a_k - b_k| on the given edges.
[[nodiscard]] double l1_distance(const std::vector<double> &edges, const std::vector<double> &a,
                                 const std::vector<double> &b);

struct ConvergenceRow {
  double l = 0.0;
  double h = 0.0;
  std::size_t steps = 0;
  double final_time = 0.0;
  /// L1 distance to the next finer level on the coarsest grid (absent on the last level).
  std::optional<double> l1_to_next;
  std::optional<WeakResiduals> residuals;
  double consistency_sum = 0.0;
  double alpha0 = 0.0;
  double max_invariant_excess = 0.0;
  double max_vrho = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  bool monotone = true;
  std::vector<std::string> violations;
};

/// Runs every level and compares them. Throws ConfigError unless there are
/// at least two strictly decreasing levels.
[[nodiscard]] ConvergenceTable converge(const RunConfig &config, const std::vector<double> &levels, double slack);

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::optional<std::vector<double>> snapshot_times;
};

struct RiemannOptions {
  std::vector<double> left;
  std::vector<double> right;
  bool wall = false;
  std::optional<std::filesystem::path> profile;
  double xi_min = -3.0;
  double xi_max = 3.0;
  int samples = 121;
  bool json = false;
};

struct ConvergeOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::optional<std::vector<double>> levels;
  std::optional<double> slack;
};

struct DiagnoseOptions {
  std::filesystem::path config;
  std::filesystem::path snapshot;
  double time = 0.0;
  std::optional<std::filesystem::path> output;
};

// Each command returns its exit code; errors are mapped by run_command.
[[nodiscard]] int cmd_run(const RunOptions &opt, const EnvLookup &env, std::ostream &out);
[[nodiscard]] int cmd_riemann(const RiemannOptions &opt, std::ostream &out);
[[nodiscard]] int cmd_converge(const ConvergeOptions &opt, const EnvLookup &env, std::ostream &out);
[[nodiscard]] int cmd_diagnose(const DiagnoseOptions &opt, const EnvLookup &env, std::ostream &out);

/// Calls `body` and maps library exceptions to exit codes, printing the
/// message to `err`.
[[nodiscard]] int run_command(const std::function<int()> &body, std::ostream &err);

} // namespace sphgrav::cli
