#include "sphgrav/gravity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

namespace sphgrav {

MassPrefix::MassPrefix(std::vector<double> edges, std::vector<double> cumulative)
    : edges_(std::move(edges)), cumulative_(std::move(cumulative)) {
  if (edges_.size() != cumulative_.size()) {
    throw DomainError("prefix edges and values differ in length");
  }
}

double MassPrefix::at(double x) const {
  if (edges_.empty() || x <= edges_.front()) {
    return 0.0;
  }
  if (x >= edges_.back()) {
    return cumulative_.back();
  }
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const auto k = static_cast<std::size_t>(it - edges_.begin()) - 1;
  const double frac = (x - edges_[k]) / (edges_[k + 1] - edges_[k]);
  return cumulative_[k] + frac * (cumulative_[k + 1] - cumulative_[k]);
}

double MassPrefix::at_center(std::size_t k) const { return 0.5 * (cumulative_[k] + cumulative_[k + 1]); }

MassPrefix prefix_mass(const CellArray &cells) {
  std::vector<double> cumulative(cells.edges().size(), 0.0);
  for (std::size_t k = 0; k < cells.size(); ++k) {
    cumulative[k + 1] = cumulative[k] + cells[k].vrho * cells.width(k);
  }
  return {cells.edges(), std::move(cumulative)};
}

State source_term(State s, double x, double prefix_at_x, int N) {
  if (!(x >= 1.0)) {
    throw DomainError(fmt::format("source evaluated at x = {} < 1", x));
  }
  const double g2 = (N - 1) / x * s.vrho - s.vrho / area_weight(x, N) * prefix_at_x;
  return {0.0, g2};
}

double potential_gradient(const MassPrefix &prefix, double x, int N) {
  if (!(x >= 1.0)) {
    throw DomainError(fmt::format("potential gradient evaluated at x = {} < 1", x));
  }
  return -prefix.at(x) / area_weight(x, N);
}

double potential_gradient(const CellArray &cells, double x, int N) {
  return potential_gradient(prefix_mass(cells), x, N);
}

double unit_ball_volume(int N) {
  const double half = 0.5 * N;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double total_mass(const CellArray &cells, int N) {
  double sum = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    sum += cells[k].vrho * cells.width(k);
  }
  return unit_ball_volume(N) * sum;
}

} // namespace sphgrav
