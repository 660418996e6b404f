#include "sphgrav/entropy.hpp"

#include <cmath>

#include <fmt/format.h>

namespace sphgrav {

namespace {

void require_xi(double xi) {
  if (!(std::abs(xi) < 1.0)) {
    throw DomainError(fmt::format("weak entropy parameter must satisfy |xi| < 1, got {}", xi));
  }
}

} // namespace

EntropyPair EntropyPair::weak(double xi) {
  require_xi(xi);
  return EntropyPair(Kind::weak, xi);
}

EntropyValue EntropyPair::operator()(State s) const {
  return kind_ == Kind::mechanical ? mechanical_entropy(s) : weak_entropy_pair(s, xi_);
}

std::string EntropyPair::label() const {
  return kind_ == Kind::mechanical ? std::string("mechanical") : fmt::format("xi={}", xi_);
}

EntropyValue weak_entropy_pair(State s, double xi) {
  require_xi(xi);
  const double u = s.velocity();
  if (xi == 0.0) {
    return {s.vrho, s.omega};
  }
  const double k = 1.0 / (1.0 - xi * xi);
  const double eta = std::exp(k * std::log(s.vrho) + xi * k * u);
  return {eta, (u + xi) * eta};
}

EntropyValue mechanical_entropy(State s) {
  if (s.vrho <= 0.0) {
    return {0.0, 0.0};
  }
  const double u = s.omega / s.vrho;
  const double lr = std::log(s.vrho);
  return {0.5 * s.omega * u + s.vrho * lr, 0.5 * s.omega * u * u + s.omega + s.omega * lr};
}

std::array<double, 4> weak_entropy_hessian(State s, double xi) {
  const double eta = weak_entropy_pair(s, xi).eta;
  const double u = s.omega / s.vrho;
  const double k = 1.0 / (1.0 - xi * xi);
  const double c = xi * xi * k * k / (s.vrho * s.vrho) * eta;
  const double off = c * (xi - u);
  return {c * (1.0 - 2.0 * xi * u + u * u), off, off, c};
}

double weak_entropy_hessian_det(State s, double xi) {
  require_xi(xi);
  const double u = s.velocity();
  const double k = 1.0 / (1.0 - xi * xi);
  const double xi2 = xi * xi;
  return xi2 * xi2 * k * k * k * std::exp((2.0 * xi2 * k - 2.0) * std::log(s.vrho) + 2.0 * xi * k * u);
}

} // namespace sphgrav
