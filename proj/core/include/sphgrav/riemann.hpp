#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphgrav/entropy.hpp"
#include "sphgrav/state.hpp"

namespace sphgrav {

enum class WaveKind { shock, rarefaction };

/// One elementary wave. For a shock speed_lo == speed_hi == sigma.
struct Wave {
  int family = 1;
  WaveKind kind = WaveKind::shock;
  State left_state;
  State right_state;
  double speed_lo = 0.0;
  double speed_hi = 0.0;

  [[nodiscard]] bool is_shock() const { return kind == WaveKind::shock; }
};

/// Self-similar solution of one Riemann problem, centred at (x0, t0).
///
/// Interior fans hold 0-2 waves ordered by family. A boundary fan is the
/// restriction of the mirrored problem to xi >= 0: `left` is the mirror
/// state, `middle` is the wall trace (omega == 0 exactly) and only the
/// reflected 2-wave is stored.
struct WaveFan {
  State left;
  State middle;
  State right;
  std::array<Wave, 2> wave_storage{};
  int wave_count = 0;
  bool is_boundary = false;
  double x0 = 0.0;
  double t0 = 0.0;

  [[nodiscard]] std::span<const Wave> waves() const {
    return {wave_storage.data(), static_cast<std::size_t>(wave_count)};
  }
  /// Slowest and fastest signal speed; both 0 for a constant fan.
  [[nodiscard]] double min_speed() const;
  [[nodiscard]] double max_speed() const;
  [[nodiscard]] bool is_constant() const { return wave_count == 0; }
};

[[nodiscard]] WaveFan solve_riemann(State left, State right, double x0 = 0.0, double t0 = 0.0);

/// Wall problem at x0 with omega = 0 on the wall, solved by reflection.
[[nodiscard]] WaveFan solve_boundary_riemann(State right, double x0 = 1.0, double t0 = 0.0);

/// State on the ray xi = (x - x0)/(t - t0). A ray exactly on a shock returns
/// the right limit.
[[nodiscard]] State sample(const WaveFan &fan, double xi);

/// Exact average over [a, b] at elapsed time t > 0 from the divergence
/// theorem. Each edge must sit at the fan centre or outside every wave for
/// the whole interval (0, t]; otherwise PreconditionError.
[[nodiscard]] State cell_average(const WaveFan &fan, double a, double b, double t);

/// State seen at x for the whole time interval (0, t], or PreconditionError
/// if a wave crosses x before time t.
[[nodiscard]] State edge_state(const WaveFan &fan, double x, double t);

/// r = sigma (v - v0) - (f(v) - f(v0)) for left state v0 and right state v.
[[nodiscard]] State rh_residual(State left, State right, double sigma);

/// sigma (eta(v) - eta(v0)) - (q(v) - q(v0)); non-negative on admissible shocks.
[[nodiscard]] double entropy_production(State left, State right, double sigma, const EntropyPair &pair);

/// |delta vrho| for each shock in the fan.
[[nodiscard]] std::vector<double> jump_strengths(const WaveFan &fan);

/// Integral of |g - mean(g)|^2 over a three-piece step function with values
/// (g_l, g_m, g_r) on consecutive lengths (l1, l2, l3).
[[nodiscard]] double three_piece_variance(double g_l, double g_m, double g_r, double l1, double l2, double l3);

/// Checks every solver invariant on one fan: positive middle density,
/// ordered wave speeds, Rankine-Hugoniot residual <= 1e-8 and mechanical
/// entropy production >= -1e-10 on shocks, characteristic speeds at
/// rarefaction edges, and the invariant-region bounds on 64 sampled rays.
/// Returns a description of the first failure.
[[nodiscard]] std::optional<std::string> verify_fan(const WaveFan &fan);

namespace detail {

/// u along the 1-curve through a left state, as a function of s = log vrho.
[[nodiscard]] double forward_curve_velocity(double s, double s_left, double u_left);
/// u along the 2-curve through a right state.
[[nodiscard]] double backward_curve_velocity(double s, double s_right, double u_right);

struct RootResult {
  double log_density = 0.0;
  int iterations = 0;
};

/// Intersection of the two wave curves in s = log vrho.
[[nodiscard]] RootResult solve_middle_log_density(double s_left, double u_left, double s_right, double u_right);

} // namespace detail

} // namespace sphgrav
