#pragma once

#include <boost/math/quadrature/gauss.hpp>

namespace sphgrav {

/// Mean of f over [a, b] with the 16-point Gauss-Legendre rule. The sum is
/// formed as f(c) + sum w_i (f(x_i) - f(c)) / 2 around the midpoint value so
/// constant integrands are reproduced bit-exactly. Works for any value type
/// with +, - and scalar *.
template <class F>
auto gauss16_mean(F &&f, double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, 16>;
  const auto &nodes = Rule::abscissa();
  const auto &weights = Rule::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto ref = f(mid);
  auto acc = 0.0 * ref;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double dx = half * nodes[i];
    acc = acc + (0.5 * weights[i]) * ((f(mid - dx) - ref) + (f(mid + dx) - ref));
  }
  return ref + acc;
}

} // namespace sphgrav
