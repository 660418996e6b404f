#pragma once

#include <vector>

#include "sphgrav/cells.hpp"
#include "sphgrav/state.hpp"

namespace sphgrav {

/// Running integral of the weighted density, int_1^x vrho ds, for
/// piecewise-constant cell averages. Linear inside each cell.
class MassPrefix {
public:
  MassPrefix() = default;
  MassPrefix(std::vector<double> edges, std::vector<double> cumulative);

  /// Value at x; 0 left of the first edge, the total right of the last.
  [[nodiscard]] double at(double x) const;
  /// Value at the midpoint of cell k.
  [[nodiscard]] double at_center(std::size_t k) const;
  [[nodiscard]] double total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }

  [[nodiscard]] const std::vector<double> &edges() const { return edges_; }
  [[nodiscard]] const std::vector<double> &cumulative() const { return cumulative_; }

private:
  std::vector<double> edges_;
  std::vector<double> cumulative_;
};

[[nodiscard]] MassPrefix prefix_mass(const CellArray &cells);

/// g(v) = (0, (N-1)/x vrho - vrho/x^{N-1} * prefix). The density component is
/// identically zero.
[[nodiscard]] State source_term(State s, double x, double prefix_at_x, int N);

/// Phi_x = -prefix(x) / x^{N-1}; zero on the wall.
[[nodiscard]] double potential_gradient(const CellArray &cells, double x, int N);
[[nodiscard]] double potential_gradient(const MassPrefix &prefix, double x, int N);

/// Volume of the unit ball in R^N.
[[nodiscard]] double unit_ball_volume(int N);

/// M = omega_N * sum_j vrho_j width_j.
[[nodiscard]] double total_mass(const CellArray &cells, int N);

} // namespace sphgrav
