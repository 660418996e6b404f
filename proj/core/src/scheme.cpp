#include "sphgrav/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sphgrav/gravity.hpp"
#include "sphgrav/quadrature.hpp"

namespace sphgrav {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

double node_position(int node, double l) { return 1.0 + node * l; }

// splitmix64; portable, so spot-check sampling is identical everywhere.
std::uint64_t mix(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// State seen by a new-layout edge for the whole step: the centre state of
// the fan sitting on it, or the untouched middle of the old cell.
State new_edge_state(const CellArray &old, const std::vector<WaveFan> &fans, int node, double x, double h) {
  const auto &nodes = old.nodes();
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), node);
  const auto k = static_cast<std::size_t>(it - nodes.begin());
  if (it != nodes.end() && *it == node) {
    return sample(fans[k], 0.0);
  }
  const std::size_t cell = k - 1;
  try {
    // Neither neighbouring fan may reach x during the step.
    (void)edge_state(fans[cell + 1], x, h);
    return edge_state(fans[cell], x, h);
  } catch (const PreconditionError &e) {
    throw CflError(fmt::format("wave reaches averaging edge x = {} within one step: {}", x, e.what()));
  }
}

} // namespace

void SchemeConfig::validate() const {
  if (N < 2) {
    throw ConfigError(fmt::format("N must be >= 2, got {}", N));
  }
  if (!(beta >= 3.0 && beta <= 4.0)) {
    throw ConfigError(fmt::format("beta must lie in [3, 4], got {}", beta));
  }
  if (!(l > 0.0 && l < 1.0)) {
    throw ConfigError(fmt::format("l must lie in (0, 1), got {}", l));
  }
  if (!(T >= 0.0) || !std::isfinite(T)) {
    throw ConfigError(fmt::format("T must be a non-negative finite time, got {}", T));
  }
  if (!(L_max > 1.0) || !std::isfinite(L_max)) {
    throw ConfigError(fmt::format("L_max must exceed 1, got {}", L_max));
  }
  const double k = (L_max - 1.0) / l;
  if (std::abs(k - std::round(k)) > 1e-6 * std::max(1.0, k)) {
    throw ConfigError(fmt::format("L_max - 1 = {} is not a whole number of cells of width l = {}", L_max - 1.0, l));
  }
  if (std::round(k) < 4) {
    throw ConfigError("the domain must hold at least four node intervals");
  }
  if (!(monitor_tolerance >= 0.0)) {
    throw ConfigError("monitor tolerance must be non-negative");
  }
  if (!(spot_check_fraction >= 0.0 && spot_check_fraction <= 1.0)) {
    throw ConfigError("spot_check_fraction must lie in [0, 1]");
  }
  if (monitor_C && !(*monitor_C >= 0.0)) {
    throw ConfigError("monitor C must be non-negative");
  }
}

double SchemeConfig::h() const { return mesh_params(l).h; }

double SchemeConfig::floor_density() const { return std::pow(l, beta); }

int SchemeConfig::node_count() const { return static_cast<int>(std::lround((L_max - 1.0) / l)); }

MeshParams mesh_params(double l) {
  if (!(l > 0.0 && l < 1.0)) {
    throw DomainError(fmt::format("mesh width must lie in (0, 1), got {}", l));
  }
  return {l, l / (10.0 * (1.0 + std::abs(std::log(l))))};
}

double max_characteristic_speed(const CellArray &cells) {
  double m = 0.0;
  for (const State &s : cells.values()) {
    const double u = s.velocity();
    m = std::max(m, std::abs(u) + 1.0);
  }
  return m;
}

bool cfl_check(const CellArray &cells, double l, double h) { return max_characteristic_speed(cells) < l / h; }

double default_monitor_C(const CellArray &initial, int N) {
  return (N - 1) + total_mass(initial, N) * unit_ball_volume(N);
}

double cfl_threshold(double C, double beta) {
  if (!(beta < 10.0)) {
    throw DomainError("cfl_threshold needs beta < 10");
  }
  // C + beta L < 10 + 10 L with L = |log l| = -log l.
  if (C < 10.0) {
    return 1.0;
  }
  return std::exp(-(C - 10.0) / (10.0 - beta));
}

State apply_cutoff(State s, double l, double beta) { return {std::max(s.vrho, std::pow(l, beta)), s.omega}; }

std::vector<int> layout_nodes(Parity parity, int K) {
  if (K < 4) {
    throw DomainError(fmt::format("layout needs at least 4 node intervals, got {}", K));
  }
  std::vector<int> nodes{0};
  for (int k = parity == Parity::odd ? 2 : 3; k <= K; k += 2) {
    nodes.push_back(k);
  }
  if (nodes.back() != K) {
    nodes.push_back(K);
  }
  return nodes;
}

CellArray make_layout(Parity parity, int K, double l, State fill) {
  std::vector<int> nodes = layout_nodes(parity, K);
  std::vector<double> edges(nodes.size());
  std::transform(nodes.begin(), nodes.end(), edges.begin(), [l](int n) { return node_position(n, l); });
  CellArray cells(std::move(edges), std::vector<State>(nodes.size() - 1, fill));
  cells.set_nodes(std::move(nodes), l);
  cells.parity = parity;
  return cells;
}

CellArray init_cells(const SchemeConfig &config) {
  config.validate();
  const double l = config.l;
  const double floor = config.floor_density();
  const double far = 1.0 / l;
  const int N = config.N;

  auto data = [&](double x) -> State {
    if (x >= far) {
      return {floor, 0.0};
    }
    const double rho = config.rho0 ? config.rho0(x) : 0.0;
    const double m = config.m0 ? config.m0(x) : 0.0;
    if (!(rho >= 0.0) || !std::isfinite(m)) {
      throw ConfigError(fmt::format("initial data invalid at x = {}: rho0 = {}, m0 = {}", x, rho, m));
    }
    const State weighted = to_weighted(PhysicalState{rho, m}, x, N);
    return {std::max(weighted.vrho, floor), weighted.omega};
  };

  CellArray cells = make_layout(Parity::even, config.node_count(), l, State{floor, 0.0});
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const double a = cells.left(k);
    const double b = cells.right(k);
    if (a < far && far < b) {
      const State lo = gauss16_mean(data, a, far);
      const State hi = gauss16_mean(data, far, b);
      cells[k] = (1.0 / (b - a)) * ((far - a) * lo + (b - far) * hi);
    } else {
      cells[k] = gauss16_mean(data, a, b);
    }
  }
  return cells;
}

StepRecord advance(const CellArray &cells, const SchemeConfig &config) {
  const auto [l, h] = mesh_params(config.l);
  const double floor = config.floor_density();
  const int N = config.N;
  if (cells.nodes().empty()) {
    throw PreconditionError("advance needs a cell array built on the staggered node layout");
  }
  const int K = cells.nodes().back();
  const std::size_t n = cells.size();
  const double t = cells.time;

  StepRecord rec;
  rec.h = h;
  rec.before = cells;
  rec.ledger.max_abs_lambda = max_characteristic_speed(cells);
  if (!(rec.ledger.max_abs_lambda < l / h)) {
    throw CflError(fmt::format("CFL violated at t = {}: max |lambda| = {} >= l/h = {}", t, rec.ledger.max_abs_lambda,
                               l / h));
  }

  const auto &edges = cells.edges();
  auto &fans = rec.fans;
  fans.reserve(n + 1);
  fans.push_back(solve_boundary_riemann(cells[0], edges[0], t));
  for (std::size_t k = 1; k < n; ++k) {
    fans.push_back(solve_riemann(cells[k - 1], cells[k], edges[k], t));
  }
  fans.push_back(solve_riemann(cells[n - 1], State{floor, 0.0}, edges[n], t));

  for (std::size_t k = 0; k < n; ++k) {
    if (edges[k] + h * fans[k].max_speed() > edges[k + 1] + h * fans[k + 1].min_speed()) {
      throw CflError(fmt::format("Riemann fans at x = {} and x = {} interact within one step", edges[k], edges[k + 1]));
    }
  }

  if (config.spot_check_fraction > 0.0) {
    const std::uint64_t base = mix(config.seed ^ (cells.step_index * kGolden));
    for (std::size_t k = 0; k < fans.size(); ++k) {
      const double r = static_cast<double>(mix(base + k) >> 11) * 0x1.0p-53;
      if (r < config.spot_check_fraction) {
        ++rec.ledger.fans_checked;
        if (auto failure = verify_fan(fans[k])) {
          throw InvariantViolation(fmt::format("fan at x = {}, t = {}: {}", edges[k], t, *failure));
        }
      }
    }
  }

  // Staggered averaging onto the opposite layout.
  CellArray next = make_layout(flip(cells.parity), K, l, State{});
  next.time = static_cast<double>(cells.step_index + 1) * h;
  next.step_index = cells.step_index + 1;
  const auto &next_nodes = next.nodes();
  std::size_t p = 0;
  State flux_lo = flux(new_edge_state(cells, fans, next_nodes[0], next.left(0), h));
  for (std::size_t c = 0; c < next.size(); ++c) {
    const double a = next.left(c);
    const double b = next.right(c);
    const State flux_hi = flux(new_edge_state(cells, fans, next_nodes[c + 1], b, h));
    while (edges[p + 1] <= a) {
      ++p;
    }
    const State ref = cells[p];
    State deviation;
    for (std::size_t k = p; k < n && edges[k] < b; ++k) {
      const double len = std::min(b, edges[k + 1]) - std::max(a, edges[k]);
      deviation = deviation + len * (cells[k] - ref);
    }
    next[c] = ref + (1.0 / (b - a)) * (deviation - h * (flux_hi - flux_lo));
    flux_lo = flux_hi;
  }
  rec.ledger.wall_flux = h * flux(sample(fans.front(), 0.0));
  rec.ledger.right_flux = h * flux(sample(fans.back(), 0.0));
  rec.averaged = next;

  if (config.source != SourceModel::none) {
    const MassPrefix prefix = prefix_mass(rec.averaged);
    for (std::size_t c = 0; c < next.size(); ++c) {
      const double mass = config.source == SourceModel::full ? prefix.at_center(c) : 0.0;
      next[c] = next[c] + h * source_term(rec.averaged[c], next.center(c), mass, N);
    }
  }
  if (config.cutoff) {
    for (std::size_t c = 0; c < next.size(); ++c) {
      const State floored = apply_cutoff(next[c], l, config.beta);
      rec.ledger.cutoff_injection += (floored.vrho - next[c].vrho) * next.width(c);
      next[c] = floored;
    }
  }
  rec.after = std::move(next);
  return rec;
}

CellArray step(const CellArray &cells, const SchemeConfig &config) { return advance(cells, config).after; }

std::size_t step_count(const SchemeConfig &config) {
  return static_cast<std::size_t>(std::floor(config.T / config.h() + 1e-9));
}

RunResult run(const SchemeConfig &config, std::span<const StepObserver> observers,
              std::vector<double> snapshot_times) {
  config.validate();
  RunResult result;
  result.h = config.h();
  result.initial = init_cells(config);
  result.max_abs_lambda = max_characteristic_speed(result.initial);
  if (!cfl_check(result.initial, config.l, result.h)) {
    throw CflError(fmt::format("CFL violated by the initial data: max |lambda| = {} >= l/h = {}",
                               result.max_abs_lambda, config.l / result.h));
  }
  result.alpha0 = config.alpha0.value_or(invariant_bound(result.initial));
  result.C = config.monitor_C.value_or(default_monitor_C(result.initial, config.N));
  result.mass.initial = result.initial.integral().vrho;
  result.steps = step_count(config);

  std::sort(snapshot_times.begin(), snapshot_times.end());
  std::size_t next_snapshot = 0;
  auto take_snapshots = [&](const CellArray &cells, bool last) {
    while (next_snapshot < snapshot_times.size() &&
           (last || snapshot_times[next_snapshot] <= cells.time + 1e-9 * result.h)) {
      result.snapshots.push_back(cells);
      ++next_snapshot;
    }
  };

  auto monitor = [&](const CellArray &cells) {
    const BoundReport report =
        monitor_bounds(cells, result.alpha0, result.C, cells.time, config.monitor_tolerance);
    result.bounds.push_back(report);
    if (!report.passed && config.abort_on_monitor) {
      throw InvariantViolation(fmt::format(
          "invariant bound violated at t = {}: sup w = {} (limit {}), inf z = {} (limit {})", cells.time,
          report.sup_w, report.w_limit, report.inf_z, report.z_limit));
    }
  };

  CellArray current = result.initial;
  monitor(current);
  take_snapshots(current, result.steps == 0);
  for (std::size_t i = 0; i < result.steps; ++i) {
    StepRecord rec = advance(current, config);
    for (const StepObserver &obs : observers) {
      obs(rec);
    }
    result.mass.cutoff_injection += rec.ledger.cutoff_injection;
    result.mass.right_outflow += rec.ledger.right_flux.vrho;
    result.mass.wall_outflow -= rec.ledger.wall_flux.vrho;
    result.max_abs_lambda = std::max(result.max_abs_lambda, rec.ledger.max_abs_lambda);
    current = std::move(rec.after);
    monitor(current);
    take_snapshots(current, i + 1 == result.steps);
  }
  result.mass.final = current.integral().vrho;
  result.final_cells = std::move(current);
  return result;
}

} // namespace sphgrav
