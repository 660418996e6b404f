#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sphgrav/cells.hpp"
#include "sphgrav/monitor.hpp"
#include "sphgrav/riemann.hpp"

namespace sphgrav {

/// Which part of g(v) the fractional step applies.
enum class SourceModel { full, geometric_only, none };

/// Run parameters. Initial data are physical (rho0, m0); the mesh time step
/// h is always derived from l.
struct SchemeConfig {
  int N = 3;
  double beta = 3.0;
  double l = 0.02;
  double T = 0.5;
  double L_max = 10.0;
  std::function<double(double)> rho0;
  std::function<double(double)> m0;

  /// Initial invariant bound; computed from the initial cells when empty.
  std::optional<double> alpha0;
  /// Growth rate of the invariant bound; defaults to N - 1 + M * omega_N.
  std::optional<double> monitor_C;
  double monitor_tolerance = 1e-9;
  bool abort_on_monitor = true;

  /// Fraction of Riemann fans re-verified each step (deterministic sampling).
  double spot_check_fraction = 0.01;
  std::uint64_t seed = 20240601;

  SourceModel source = SourceModel::full;
  bool cutoff = true;

  /// Throws ConfigError on any inconsistent field.
  void validate() const;
  [[nodiscard]] double h() const;
  [[nodiscard]] double floor_density() const;
  /// Number of node intervals K with 1 + K l == L_max (rounded).
  [[nodiscard]] int node_count() const;
};

struct MeshParams {
  double l = 0.0;
  double h = 0.0;
};

/// h = l / (10 (1 + |log l|)).
[[nodiscard]] MeshParams mesh_params(double l);

/// max over cells of max(|lambda1|, |lambda2|) < l/h.
[[nodiscard]] bool cfl_check(const CellArray &cells, double l, double h);
[[nodiscard]] double max_characteristic_speed(const CellArray &cells);

/// N - 1 + M omega_N with M the total mass of `initial`.
[[nodiscard]] double default_monitor_C(const CellArray &initial, int N);

/// Largest l0 in (0, 1] such that C + beta |log l| < 10 (1 + |log l|) for
/// every l < l0.
[[nodiscard]] double cfl_threshold(double C, double beta);

/// (max(vrho, l^beta), omega).
[[nodiscard]] State apply_cutoff(State s, double l, double beta);

/// Edge node indices of the staggered layout on nodes 0..K. Odd layouts use
/// edges 0, 2, 4, ...; even layouts 0, 3, 5, ... so the wall cell is
/// [1, 1 + 3l]. A half cell closes the layout at node K when needed.
[[nodiscard]] std::vector<int> layout_nodes(Parity parity, int K);

/// Cell array on the given layout with every value set to `fill`.
[[nodiscard]] CellArray make_layout(Parity parity, int K, double l, State fill);

/// Cut-off initial data averaged onto the even layout with 16-point
/// Gauss-Legendre quadrature per cell.
[[nodiscard]] CellArray init_cells(const SchemeConfig &config);

/// Bookkeeping for one step.
struct StepLedger {
  /// Mass added by the density floor.
  double cutoff_injection = 0.0;
  /// h * f(trace) at the wall and at L_max (time integrals of the fluxes).
  State wall_flux;
  State right_flux;
  double max_abs_lambda = 0.0;
  std::size_t fans_checked = 0;
};

/// Everything one step produced. `averaged` holds the exact averages of the
/// Riemann solution before the source and cut-off are applied.
struct StepRecord {
  CellArray before;
  std::vector<WaveFan> fans;
  CellArray averaged;
  CellArray after;
  double h = 0.0;
  StepLedger ledger;
};

/// One full step: Riemann fans, staggered averaging, fractional source,
/// cut-off. Throws CflError or InvariantViolation.
[[nodiscard]] StepRecord advance(const CellArray &cells, const SchemeConfig &config);
[[nodiscard]] CellArray step(const CellArray &cells, const SchemeConfig &config);

/// Integral over time of the boundary mass fluxes plus cut-off injections.
struct MassLedger {
  double initial = 0.0;
  double final = 0.0;
  double cutoff_injection = 0.0;
  /// Mass that left through x = L_max (positive for outflow).
  double right_outflow = 0.0;
  /// Mass that left through the wall; zero since omega = 0 there.
  double wall_outflow = 0.0;

  /// final - initial - (injection - outflow); zero up to rounding.
  [[nodiscard]] double imbalance() const {
    return final - initial - (cutoff_injection - right_outflow - wall_outflow);
  }
};

using StepObserver = std::function<void(const StepRecord &)>;

struct RunResult {
  CellArray initial;
  CellArray final_cells;
  std::vector<CellArray> snapshots;
  std::vector<BoundReport> bounds;
  MassLedger mass;
  double alpha0 = 0.0;
  double C = 0.0;
  double h = 0.0;
  std::size_t steps = 0;
  double max_abs_lambda = 0.0;
};

/// Number of steps taken for final time T (t_n = n h <= T).
[[nodiscard]] std::size_t step_count(const SchemeConfig &config);

/// Steps from the initial cells until n h reaches T. `snapshot_times` picks
/// the first time level at or after each requested time; an empty list
/// means only the final state.
[[nodiscard]] RunResult run(const SchemeConfig &config, std::span<const StepObserver> observers = {},
                            std::vector<double> snapshot_times = {});

} // namespace sphgrav
