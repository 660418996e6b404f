#include "sphgrav/cells.hpp"

#include <algorithm>

namespace sphgrav {

CellArray::CellArray(std::vector<double> edges, std::vector<State> values)
    : edges_(std::move(edges)), values_(std::move(values)) {
  if (edges_.size() != values_.size() + 1) {
    throw DomainError("cell array needs exactly one more edge than values");
  }
  for (std::size_t k = 0; k + 1 < edges_.size(); ++k) {
    if (!(edges_[k + 1] > edges_[k])) {
      throw DomainError("cell edges must be strictly increasing");
    }
  }
}

void CellArray::set_nodes(std::vector<int> nodes, double spacing) {
  if (nodes.size() != edges_.size()) {
    throw DomainError("node list does not match edges");
  }
  nodes_ = std::move(nodes);
  spacing_ = spacing;
}

State CellArray::integral() const {
  State sum;
  for (std::size_t k = 0; k < values_.size(); ++k) {
    sum = sum + width(k) * values_[k];
  }
  return sum;
}

std::size_t CellArray::locate(double x) const {
  if (values_.empty()) {
    throw DomainError("locate on an empty cell array");
  }
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  const auto idx = static_cast<std::ptrdiff_t>(it - edges_.begin()) - 1;
  return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(values_.size()) - 1));
}

} // namespace sphgrav
