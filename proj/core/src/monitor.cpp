#include "sphgrav/monitor.hpp"

#include <algorithm>
#include <limits>

namespace sphgrav {

BoundReport monitor_bounds(const CellArray &cells, double alpha0, double C, double t, double tol) {
  BoundReport r;
  r.time = t;
  r.sup_w = -std::numeric_limits<double>::infinity();
  r.inf_z = std::numeric_limits<double>::infinity();
  r.min_vrho = std::numeric_limits<double>::infinity();
  r.max_vrho = -std::numeric_limits<double>::infinity();
  for (const State &s : cells.values()) {
    const Invariants inv = riemann_invariants(s);
    r.sup_w = std::max(r.sup_w, inv.w);
    r.inf_z = std::min(r.inf_z, inv.z);
    r.min_vrho = std::min(r.min_vrho, s.vrho);
    r.max_vrho = std::max(r.max_vrho, s.vrho);
  }
  r.w_limit = alpha0 + C * t;
  r.z_limit = -alpha0 - C * t;
  r.passed = r.sup_w <= r.w_limit + tol && r.inf_z >= r.z_limit - tol;
  return r;
}

double invariant_bound(const CellArray &cells) {
  double alpha = -std::numeric_limits<double>::infinity();
  for (const State &s : cells.values()) {
    const Invariants inv = riemann_invariants(s);
    alpha = std::max({alpha, inv.w, -inv.z});
  }
  return alpha;
}

} // namespace sphgrav
