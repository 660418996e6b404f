#include "sphgrav/state.hpp"

#include <cmath>
#include <string>

namespace sphgrav {

namespace {

void require_radius(double x, int N) {
  if (!(x >= 1.0)) {
    throw DomainError("radius " + std::to_string(x) + " lies inside the unit ball");
  }
  if (N < 2) {
    throw DomainError("spatial dimension must be at least 2, got " + std::to_string(N));
  }
}

void require_nonvacuum(State s) {
  if (!(s.vrho > 0.0)) {
    throw DomainError("vacuum state (vrho = " + std::to_string(s.vrho) + ") has no velocity");
  }
}

} // namespace

double State::velocity() const {
  require_nonvacuum(*this);
  return omega / vrho;
}

double area_weight(double x, int N) { return N == 2 ? x : (N == 3 ? x * x : std::pow(x, N - 1)); }

State to_weighted(PhysicalState p, double x, int N) {
  require_radius(x, N);
  if (p.rho < 0.0) {
    throw DomainError("negative density");
  }
  const double a = area_weight(x, N);
  return {a * p.rho, a * p.m};
}

PhysicalState from_weighted(State s, double x, int N) {
  require_radius(x, N);
  const double a = area_weight(x, N);
  return {s.vrho / a, s.omega / a};
}

Invariants riemann_invariants(State s) {
  require_nonvacuum(s);
  const double u = s.omega / s.vrho;
  const double lr = std::log(s.vrho);
  return {u + lr, u - lr};
}

State from_invariants(Invariants inv) {
  const double vrho = std::exp(0.5 * (inv.w - inv.z));
  return {vrho, vrho * 0.5 * (inv.w + inv.z)};
}

Eigenvalues eigenvalues(State s) {
  const double u = s.velocity();
  return {u - 1.0, u + 1.0};
}

bool in_region(State s, RegionTheta theta) {
  const Invariants inv = riemann_invariants(s);
  return inv.w <= theta.w_max && inv.z >= theta.z_min;
}

State flux(State s) {
  const double u = s.velocity();
  return {s.omega, s.omega * u + s.vrho};
}

} // namespace sphgrav
