#pragma once

#include <array>
#include <string>

#include "sphgrav/state.hpp"

namespace sphgrav {

struct EntropyValue {
  double eta = 0.0;
  double q = 0.0;
};

/// Either the mechanical energy pair or a member of the weak-entropy family
///   eta = vrho^{1/(1-xi^2)} exp(xi/(1-xi^2) * u),  q = (u + xi) eta.
class EntropyPair {
public:
  static EntropyPair mechanical() { return EntropyPair(Kind::mechanical, 0.0); }
  /// Throws DomainError unless |xi| < 1.
  static EntropyPair weak(double xi);

  [[nodiscard]] EntropyValue operator()(State s) const;

  [[nodiscard]] bool is_mechanical() const { return kind_ == Kind::mechanical; }
  [[nodiscard]] double xi() const { return xi_; }
  /// "mechanical" or "xi=<value>"; used as a JSON key.
  [[nodiscard]] std::string label() const;

private:
  enum class Kind { mechanical, weak };
  EntropyPair(Kind kind, double xi) : kind_(kind), xi_(xi) {}

  Kind kind_;
  double xi_;
};

[[nodiscard]] EntropyValue weak_entropy_pair(State s, double xi);

/// eta_e = omega^2/(2 vrho) + vrho log vrho, q_e = omega^3/(2 vrho^2) + omega + omega log vrho.
/// Extends by zero at vacuum.
[[nodiscard]] EntropyValue mechanical_entropy(State s);

/// Analytic Hessian of the weak entropy in (vrho, omega), row-major
/// {eta_rr, eta_rw, eta_wr, eta_ww}.
[[nodiscard]] std::array<double, 4> weak_entropy_hessian(State s, double xi);

/// Closed form of det(Hessian):
///   xi^4/(1-xi^2)^3 vrho^{2 xi^2/(1-xi^2) - 2} exp(2 xi/(1-xi^2) u).
[[nodiscard]] double weak_entropy_hessian_det(State s, double xi);

} // namespace sphgrav
