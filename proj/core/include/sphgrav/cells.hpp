#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sphgrav/state.hpp"

namespace sphgrav {

enum class Parity : std::uint8_t { even, odd };

[[nodiscard]] inline Parity flip(Parity p) { return p == Parity::even ? Parity::odd : Parity::even; }

/// Piecewise-constant cell averages on a partition of [edges.front(), edges.back()].
///
/// Arrays produced by the scheme also carry the integer node index of every
/// edge (edge x = 1 + node * spacing); generic arrays built from explicit
/// edges leave `nodes` empty.
class CellArray {
public:
  CellArray() = default;
  /// Throws DomainError unless edges are strictly increasing and
  /// values.size() + 1 == edges.size().
  CellArray(std::vector<double> edges, std::vector<State> values);

  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }

  [[nodiscard]] double left(std::size_t k) const { return edges_[k]; }
  [[nodiscard]] double right(std::size_t k) const { return edges_[k + 1]; }
  [[nodiscard]] double width(std::size_t k) const { return edges_[k + 1] - edges_[k]; }
  [[nodiscard]] double center(std::size_t k) const { return 0.5 * (edges_[k] + edges_[k + 1]); }

  [[nodiscard]] const std::vector<double> &edges() const { return edges_; }
  [[nodiscard]] const std::vector<State> &values() const { return values_; }
  [[nodiscard]] std::vector<State> &values() { return values_; }
  [[nodiscard]] const State &operator[](std::size_t k) const { return values_[k]; }
  [[nodiscard]] State &operator[](std::size_t k) { return values_[k]; }

  [[nodiscard]] const std::vector<int> &nodes() const { return nodes_; }
  [[nodiscard]] double spacing() const { return spacing_; }
  void set_nodes(std::vector<int> nodes, double spacing);

  /// sum_k width_k * values_k, accumulated left to right.
  [[nodiscard]] State integral() const;
  /// Index of the cell containing x (edges belong to the cell on their right).
  [[nodiscard]] std::size_t locate(double x) const;

  Parity parity = Parity::even;
  double time = 0.0;
  std::size_t step_index = 0;

private:
  std::vector<double> edges_;
  std::vector<State> values_;
  std::vector<int> nodes_;
  double spacing_ = 0.0;
};

} // namespace sphgrav
