#pragma once

#include <utility>

#include "sphgrav/errors.hpp"

namespace sphgrav {

/// Physical density and radial momentum density at one radius.
struct PhysicalState {
  double rho = 0.0;
  double m = 0.0;

  friend bool operator==(const PhysicalState &, const PhysicalState &) = default;
};

/// Weighted variables vrho = x^{N-1} rho, omega = x^{N-1} m. This is the
/// working variable of the scheme; every flux and source is written in it.
struct State {
  double vrho = 0.0;
  double omega = 0.0;

  /// omega / vrho. Throws DomainError at vacuum: the velocity of an empty
  /// state is undefined, not zero.
  [[nodiscard]] double velocity() const;

  friend bool operator==(const State &, const State &) = default;
};

inline State operator+(State a, State b) { return {a.vrho + b.vrho, a.omega + b.omega}; }
inline State operator-(State a, State b) { return {a.vrho - b.vrho, a.omega - b.omega}; }
inline State operator*(double s, State a) { return {s * a.vrho, s * a.omega}; }

/// Riemann invariants w = u + log vrho, z = u - log vrho.
struct Invariants {
  double w = 0.0;
  double z = 0.0;
};

/// The region {w <= w_max, z >= z_min}. Convex in (vrho, omega), so cell
/// averaging cannot leave it.
struct RegionTheta {
  double w_max = 0.0;
  double z_min = 0.0;
};

struct Eigenvalues {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

[[nodiscard]] State to_weighted(PhysicalState p, double x, int N);
[[nodiscard]] PhysicalState from_weighted(State s, double x, int N);

[[nodiscard]] Invariants riemann_invariants(State s);
[[nodiscard]] State from_invariants(Invariants inv);

/// Characteristic speeds u -/+ 1 (unit isothermal sound speed).
[[nodiscard]] Eigenvalues eigenvalues(State s);

[[nodiscard]] bool in_region(State s, RegionTheta theta);

/// Flux f(v) = (omega, omega^2/vrho + vrho) of the homogeneous system.
[[nodiscard]] State flux(State s);

/// Build a state from density and velocity.
[[nodiscard]] inline State from_density_velocity(double vrho, double u) { return {vrho, vrho * u}; }

/// x^{N-1}, the spherical area weight.
[[nodiscard]] double area_weight(double x, int N);

} // namespace sphgrav
