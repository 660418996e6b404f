#include "sphgrav/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace sphgrav {

namespace {

constexpr double kLogLo = -745.0;
constexpr double kLogHi = 100.0;
constexpr double kBracketWidth = 1e-13;
constexpr int kMaxIterations = 400;

// Velocity change along a wave curve for log-density increment d:
// rarefaction branch (d <= 0) is linear, shock branch is 2 sinh(d/2).
double curve_increment(double d) { return d <= 0.0 ? d : 2.0 * std::sinh(0.5 * d); }
double curve_slope(double d) { return d <= 0.0 ? 1.0 : std::cosh(0.5 * d); }

void require_positive(State s, const char *which) {
  if (!(s.vrho > 0.0) || !std::isfinite(s.vrho) || !std::isfinite(s.omega)) {
    throw DomainError(fmt::format("{} state must have positive finite density, got ({}, {})", which, s.vrho, s.omega));
  }
}

} // namespace

namespace detail {

double forward_curve_velocity(double s, double s_left, double u_left) { return u_left - curve_increment(s - s_left); }

double backward_curve_velocity(double s, double s_right, double u_right) {
  return u_right + curve_increment(s - s_right);
}

RootResult solve_middle_log_density(double s_left, double u_left, double s_right, double u_right) {
  // F is strictly decreasing in s.
  auto residual = [&](double s) {
    return (u_left - curve_increment(s - s_left)) - (u_right + curve_increment(s - s_right));
  };
  auto slope = [&](double s) { return -curve_slope(s - s_left) - curve_slope(s - s_right); };

  double lo = kLogLo;
  double hi = kLogHi;
  if (!(residual(lo) > 0.0) || !(residual(hi) < 0.0)) {
    throw InvariantViolation(fmt::format("wave curves not bracketed for (s,u) = ({}, {}) | ({}, {})", s_left, u_left,
                                         s_right, u_right));
  }

  // Two-rarefaction closed form is exact when it lies below both densities
  // and a good start otherwise.
  double s = std::clamp(0.5 * ((u_left + s_left) - (u_right - s_right)), lo, hi);
  int it = 0;
  for (; it < kMaxIterations && hi - lo > kBracketWidth; ++it) {
    const double f = residual(s);
    if (f == 0.0) {
      lo = hi = s;
      break;
    }
    (f > 0.0 ? lo : hi) = s;
    const double newton = s - f / slope(s);
    const double step_taken = std::abs(newton - s);
    if (newton > lo && newton < hi && step_taken < 0.5 * (hi - lo)) {
      s = newton;
      if (step_taken < 1e-15 * std::max(1.0, std::abs(s))) {
        break;
      }
    } else {
      s = 0.5 * (lo + hi);
    }
  }
  for (int polish = 0; polish < 2; ++polish) {
    const double f = residual(s);
    if (f == 0.0) {
      break;
    }
    const double next = s - f / slope(s);
    if (std::isfinite(next)) {
      s = std::clamp(next, kLogLo, kLogHi);
    }
  }
  return {s, it};
}

} // namespace detail

double WaveFan::min_speed() const {
  return wave_count == 0 ? 0.0 : wave_storage[0].speed_lo;
}

double WaveFan::max_speed() const {
  return wave_count == 0 ? 0.0 : wave_storage[static_cast<std::size_t>(wave_count - 1)].speed_hi;
}

WaveFan solve_riemann(State left, State right, double x0, double t0) {
  require_positive(left, "left");
  require_positive(right, "right");
  WaveFan fan;
  fan.left = left;
  fan.right = right;
  fan.x0 = x0;
  fan.t0 = t0;
  if (left == right) {
    fan.middle = left;
    return fan;
  }

  const double s_left = std::log(left.vrho);
  const double s_right = std::log(right.vrho);
  const double u_left = left.omega / left.vrho;
  const double u_right = right.omega / right.vrho;

  const double s_mid = detail::solve_middle_log_density(s_left, u_left, s_right, u_right).log_density;
  const double u_mid = 0.5 * (detail::forward_curve_velocity(s_mid, s_left, u_left) +
                              detail::backward_curve_velocity(s_mid, s_right, u_right));
  const double rho_mid = std::exp(s_mid);
  fan.middle = from_density_velocity(rho_mid, u_mid);

  if (s_mid != s_left) {
    Wave &w = fan.wave_storage[static_cast<std::size_t>(fan.wave_count++)];
    w.family = 1;
    w.left_state = left;
    w.right_state = fan.middle;
    if (s_mid > s_left) {
      w.kind = WaveKind::shock;
      w.speed_lo = w.speed_hi = u_left - std::exp(0.5 * (s_mid - s_left));
    } else {
      w.kind = WaveKind::rarefaction;
      w.speed_lo = u_left - 1.0;
      w.speed_hi = u_mid - 1.0;
    }
  }
  if (s_mid != s_right) {
    Wave &w = fan.wave_storage[static_cast<std::size_t>(fan.wave_count++)];
    w.family = 2;
    w.left_state = fan.middle;
    w.right_state = right;
    if (s_mid > s_right) {
      w.kind = WaveKind::shock;
      w.speed_lo = w.speed_hi = u_right + std::exp(0.5 * (s_mid - s_right));
    } else {
      w.kind = WaveKind::rarefaction;
      w.speed_lo = u_mid + 1.0;
      w.speed_hi = u_right + 1.0;
    }
  }
  return fan;
}

WaveFan solve_boundary_riemann(State right, double x0, double t0) {
  require_positive(right, "right");
  const State mirror{right.vrho, -right.omega};
  WaveFan full = solve_riemann(mirror, right, x0, t0);

  WaveFan fan;
  fan.is_boundary = true;
  fan.x0 = x0;
  fan.t0 = t0;
  fan.left = mirror;
  fan.right = right;
  fan.middle = State{full.middle.vrho, 0.0};
  for (const Wave &w : full.waves()) {
    if (w.family == 2) {
      Wave reflected = w;
      reflected.left_state = fan.middle;
      fan.wave_storage[0] = reflected;
      fan.wave_count = 1;
    }
  }
  if (fan.wave_count == 0) {
    fan.middle = right;
  }
  return fan;
}

State sample(const WaveFan &fan, double xi) {
  if (fan.is_boundary && xi < 0.0) {
    throw DomainError(fmt::format("boundary fan sampled at xi = {} < 0 (behind the wall)", xi));
  }
  if (fan.wave_count == 0) {
    return fan.middle;
  }
  const auto waves = fan.waves();
  std::size_t k = 0;
  if (waves[0].family == 1) {
    const Wave &w = waves[0];
    if (xi < w.speed_lo) {
      return fan.left;
    }
    if (w.kind == WaveKind::rarefaction && xi < w.speed_hi) {
      const double u = xi + 1.0;
      const double w_left = riemann_invariants(fan.left).w;
      return from_density_velocity(std::exp(w_left - u), u);
    }
    k = 1;
  }
  if (k < waves.size()) {
    const Wave &w = waves[k];
    if (xi < w.speed_lo) {
      return fan.middle;
    }
    if (w.kind == WaveKind::rarefaction && xi < w.speed_hi) {
      const double u = xi - 1.0;
      const double z_right = riemann_invariants(fan.right).z;
      return from_density_velocity(std::exp(u - z_right), u);
    }
    return fan.right;
  }
  return fan.middle;
}

State edge_state(const WaveFan &fan, double x, double t) {
  if (fan.is_boundary && x < fan.x0) {
    throw DomainError(fmt::format("edge {} lies behind the wall at {}", x, fan.x0));
  }
  if (fan.wave_count == 0) {
    return fan.middle;
  }
  if (x == fan.x0) {
    return sample(fan, 0.0);
  }
  const double offset = x - fan.x0;
  if (offset < 0.0 && offset <= t * fan.min_speed()) {
    return fan.left;
  }
  if (offset > 0.0 && offset >= t * fan.max_speed()) {
    return fan.right;
  }
  throw PreconditionError(fmt::format("a wave of the fan at x0 = {} crosses x = {} before t = {}", fan.x0, x, t));
}

State cell_average(const WaveFan &fan, double a, double b, double t) {
  if (!(b > a)) {
    throw PreconditionError(fmt::format("empty averaging interval [{}, {}]", a, b));
  }
  if (!(t > 0.0)) {
    throw PreconditionError("cell_average needs elapsed time t > 0");
  }
  const State va = edge_state(fan, a, t);
  const State vb = edge_state(fan, b, t);
  if (fan.is_constant()) {
    return fan.middle;
  }
  State integral;
  if (fan.is_boundary) {
    integral = (b - a) * fan.right;
  } else {
    const double left_len = std::max(0.0, std::min(b, fan.x0) - a);
    const double right_len = std::max(0.0, b - std::max(a, fan.x0));
    integral = left_len * fan.left + right_len * fan.right;
  }
  const State flux_diff = flux(vb) - flux(va);
  return (1.0 / (b - a)) * (integral - t * flux_diff);
}

State rh_residual(State left, State right, double sigma) {
  require_positive(left, "left");
  require_positive(right, "right");
  return sigma * (right - left) - (flux(right) - flux(left));
}

double entropy_production(State left, State right, double sigma, const EntropyPair &pair) {
  require_positive(left, "left");
  require_positive(right, "right");
  const EntropyValue l = pair(left);
  const EntropyValue r = pair(right);
  return sigma * (r.eta - l.eta) - (r.q - l.q);
}

std::vector<double> jump_strengths(const WaveFan &fan) {
  std::vector<double> out;
  for (const Wave &w : fan.waves()) {
    if (w.is_shock()) {
      out.push_back(std::abs(w.right_state.vrho - w.left_state.vrho));
    }
  }
  return out;
}

double three_piece_variance(double g_l, double g_m, double g_r, double l1, double l2, double l3) {
  if (l1 < 0.0 || l2 < 0.0 || l3 < 0.0) {
    throw DomainError("piece lengths must be non-negative");
  }
  const double l = l1 + l2 + l3;
  if (!(l > 0.0)) {
    throw DomainError("three_piece_variance needs positive total length");
  }
  const double a = l1 / l;
  const double m = l2 / l;
  const double c = l3 / l;
  const double dr_l = g_r - g_l;
  const double dr_m = g_r - g_m;
  const double dm_l = g_m - g_l;
  return l * (a * c * dr_l * dr_l + m * c * dr_m * dr_m + a * m * dm_l * dm_l);
}

} // namespace sphgrav

namespace sphgrav {

std::optional<std::string> verify_fan(const WaveFan &fan) {
  constexpr double kRh = 1e-8;
  constexpr double kEntropy = -1e-10;
  constexpr double kRegion = 1e-9;
  if (!(fan.middle.vrho > 0.0)) {
    return fmt::format("middle density {} is not positive", fan.middle.vrho);
  }
  const auto waves = fan.waves();
  if (waves.size() == 2 && waves[0].speed_hi > waves[1].speed_lo + 1e-12) {
    return fmt::format("1-wave speed {} exceeds 2-wave speed {}", waves[0].speed_hi, waves[1].speed_lo);
  }
  for (const Wave &w : waves) {
    if (w.is_shock()) {
      const State r = rh_residual(w.left_state, w.right_state, w.speed_lo);
      if (std::abs(r.vrho) > kRh || std::abs(r.omega) > kRh) {
        return fmt::format("family-{} shock Rankine-Hugoniot residual ({}, {})", w.family, r.vrho, r.omega);
      }
      const double prod = entropy_production(w.left_state, w.right_state, w.speed_lo, EntropyPair::mechanical());
      if (prod < kEntropy) {
        return fmt::format("family-{} shock produces negative entropy {}", w.family, prod);
      }
    } else {
      const auto lam_l = eigenvalues(w.left_state);
      const auto lam_r = eigenvalues(w.right_state);
      const double lo = w.family == 1 ? lam_l.lambda1 : lam_l.lambda2;
      const double hi = w.family == 1 ? lam_r.lambda1 : lam_r.lambda2;
      if (std::abs(lo - w.speed_lo) > 1e-9 || std::abs(hi - w.speed_hi) > 1e-9 || w.speed_lo > w.speed_hi) {
        return fmt::format("family-{} rarefaction edges [{}, {}] disagree with characteristic speeds [{}, {}]",
                           w.family, w.speed_lo, w.speed_hi, lo, hi);
      }
    }
  }

  const Invariants right = riemann_invariants(fan.right);
  double w_max = 0.0;
  double z_min = 0.0;
  double xi_lo = fan.min_speed() - 1.0;
  const double xi_hi = fan.max_speed() + 1.0;
  if (fan.is_boundary) {
    w_max = std::max(right.w, -right.z);
    z_min = std::min(0.0, right.z);
    xi_lo = 0.0;
  } else {
    const Invariants left = riemann_invariants(fan.left);
    w_max = std::max(left.w, right.w);
    z_min = std::min(left.z, right.z);
  }
  constexpr int kRays = 64;
  for (int k = 0; k < kRays; ++k) {
    const double xi = xi_lo + (xi_hi - xi_lo) * k / (kRays - 1);
    const Invariants inv = riemann_invariants(sample(fan, xi));
    if (inv.w > w_max + kRegion || inv.z < z_min - kRegion) {
      return fmt::format("sampled state at xi = {} has (w, z) = ({}, {}) outside w <= {}, z >= {}", xi, inv.w, inv.z,
                         w_max, z_min);
    }
  }
  return std::nullopt;
}

} // namespace sphgrav
