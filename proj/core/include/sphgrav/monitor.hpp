#pragma once

#include "sphgrav/cells.hpp"

namespace sphgrav {

/// Extremes of the Riemann invariants and density over one cell array,
/// checked against w <= alpha0 + C t + tol and z >= -alpha0 - C t - tol.
struct BoundReport {
  double time = 0.0;
  double sup_w = 0.0;
  double inf_z = 0.0;
  double min_vrho = 0.0;
  double max_vrho = 0.0;
  double w_limit = 0.0;
  double z_limit = 0.0;
  bool passed = true;
};

[[nodiscard]] BoundReport monitor_bounds(const CellArray &cells, double alpha0, double C, double t, double tol = 0.0);

/// max over cells of max(w, -z).
[[nodiscard]] double invariant_bound(const CellArray &cells);

} // namespace sphgrav
