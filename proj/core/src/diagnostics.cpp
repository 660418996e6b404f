#include "sphgrav/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "sphgrav/gravity.hpp"
#include "sphgrav/quadrature.hpp"

namespace sphgrav {

namespace {

double wendland(double s) {
  const double r = std::abs(s);
  if (r >= 1.0) {
    return 0.0;
  }
  const double q = 1.0 - r;
  return q * q * q * q * (4.0 * r + 1.0);
}

double wendland_derivative(double s) {
  const double r = std::abs(s);
  if (r >= 1.0) {
    return 0.0;
  }
  const double q = 1.0 - r;
  return -20.0 * s * q * q * q;
}

double squared_distance(State a, State b) {
  const State d = a - b;
  return d.vrho * d.vrho + d.omega * d.omega;
}

// Antiderivative of x^{1-N}.
double inverse_area_primitive(double x, int N) { return N == 2 ? std::log(x) : std::pow(x, 2 - N) / (2 - N); }

double trapezoid_average(const std::vector<std::pair<double, double>> &series) {
  if (series.empty()) {
    return 0.0;
  }
  if (series.size() == 1 || series.back().first <= series.front().first) {
    return series.front().second;
  }
  double integral = 0.0;
  for (std::size_t i = 1; i < series.size(); ++i) {
    integral += 0.5 * (series[i].first - series[i - 1].first) * (series[i].second + series[i - 1].second);
  }
  return integral / (series.back().first - series.front().first);
}

void require_support(const BumpTestFunction &phi, double x_lo, double x_hi, double t_hi) {
  if (phi.amplitude == 0.0) {
    return;
  }
  if (phi.x_center - phi.x_radius <= x_lo || phi.x_center + phi.x_radius >= x_hi ||
      phi.t_center - phi.t_radius <= 0.0 || phi.t_center + phi.t_radius >= t_hi) {
    throw PreconditionError(fmt::format("test function support [{}, {}] x [{}, {}] is not inside ({}, {}) x (0, {})",
                                        phi.x_center - phi.x_radius, phi.x_center + phi.x_radius,
                                        phi.t_center - phi.t_radius, phi.t_center + phi.t_radius, x_lo, x_hi,
                                        t_hi));
  }
}

} // namespace

double BumpTestFunction::value(double x, double t) const {
  return amplitude * wendland((x - x_center) / x_radius) * wendland((t - t_center) / t_radius);
}

double BumpTestFunction::dx(double x, double t) const {
  return amplitude * wendland_derivative((x - x_center) / x_radius) / x_radius * wendland((t - t_center) / t_radius);
}

double BumpTestFunction::dt(double x, double t) const {
  return amplitude * wendland((x - x_center) / x_radius) * wendland_derivative((t - t_center) / t_radius) / t_radius;
}

BumpTestFunction standard_bump(double T) { return {3.0, 1.5, 0.5 * T, 0.45 * T, 1.0}; }

std::vector<double> default_xi_grid() { return {0.0, 0.1, -0.1, 0.25, -0.25, 0.4, -0.4, 0.49, -0.49}; }

double consistency_contribution(const StepRecord &rec) {
  const CellArray &old = rec.before;
  const CellArray &avg = rec.averaged;
  const auto &oe = old.edges();
  const auto &fans = rec.fans;
  const std::size_t n = old.size();
  const double h = rec.h;

  auto solution = [&](std::size_t k, double x) {
    return x < old.center(k) ? sample(fans[k], (x - oe[k]) / h) : sample(fans[k + 1], (x - oe[k + 1]) / h);
  };

  std::vector<double> cuts;
  std::vector<std::pair<double, double>> smooth;
  double total = 0.0;
  std::size_t p = 0;
  for (std::size_t c = 0; c < avg.size(); ++c) {
    const double a = avg.left(c);
    const double b = avg.right(c);
    const State mean = avg[c];
    while (oe[p + 1] <= a) {
      ++p;
    }
    cuts.assign({a, b});
    smooth.clear();
    for (std::size_t k = p; k <= n && oe[k] <= b; ++k) {
      for (const Wave &w : fans[k].waves()) {
        const double lo = oe[k] + h * w.speed_lo;
        const double hi = oe[k] + h * w.speed_hi;
        if (lo > a && lo < b) {
          cuts.push_back(lo);
        }
        if (hi > a && hi < b && hi != lo) {
          cuts.push_back(hi);
        }
        if (!w.is_shock()) {
          smooth.emplace_back(lo, hi);
        }
      }
    }
    std::sort(cuts.begin(), cuts.end());
    std::size_t k = p;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double x0 = cuts[i];
      const double x1 = cuts[i + 1];
      if (!(x1 > x0)) {
        continue;
      }
      const double xm = 0.5 * (x0 + x1);
      while (k + 1 < n && oe[k + 1] <= xm) {
        ++k;
      }
      const bool in_rarefaction = std::any_of(smooth.begin(), smooth.end(),
                                              [xm](const auto &iv) { return xm > iv.first && xm < iv.second; });
      if (in_rarefaction) {
        total += (x1 - x0) * gauss16_mean([&](double x) { return squared_distance(solution(k, x), mean); }, x0, x1);
      } else {
        total += (x1 - x0) * squared_distance(solution(k, xm), mean);
      }
    }
  }
  return total;
}

namespace {

template <class F>
void for_each_domain_shock(const StepRecord &rec, F &&f) {
  const std::size_t last = rec.fans.size() - 1;
  for (std::size_t k = 0; k < rec.fans.size(); ++k) {
    for (const Wave &w : rec.fans[k].waves()) {
      // The ghost fan at L_max only contributes shocks moving into the domain.
      if (!w.is_shock() || (k == last && w.speed_lo > 0.0)) {
        continue;
      }
      f(w);
    }
  }
}

} // namespace

double entropy_production_contribution(const StepRecord &rec, const EntropyPair &pair) {
  double sum = 0.0;
  for_each_domain_shock(rec, [&](const Wave &w) {
    sum += entropy_production(w.left_state, w.right_state, w.speed_lo, pair);
  });
  return rec.h * sum;
}

double min_shock_entropy_production(const StepRecord &rec) {
  double m = std::numeric_limits<double>::infinity();
  const EntropyPair mech = EntropyPair::mechanical();
  for_each_domain_shock(rec, [&](const Wave &w) {
    m = std::min(m, entropy_production(w.left_state, w.right_state, w.speed_lo, mech));
  });
  return m;
}

double step_conservation_error(const StepRecord &rec) {
  const State before = rec.before.integral();
  const State after = rec.averaged.integral();
  const State boundary = rec.ledger.right_flux - rec.ledger.wall_flux;
  const State defect = after - before + boundary;
  double scale_r = std::abs(rec.ledger.right_flux.vrho) + std::abs(rec.ledger.wall_flux.vrho);
  double scale_w = std::abs(rec.ledger.right_flux.omega) + std::abs(rec.ledger.wall_flux.omega);
  for (std::size_t k = 0; k < rec.before.size(); ++k) {
    scale_r += rec.before.width(k) * std::abs(rec.before[k].vrho);
    scale_w += rec.before.width(k) * std::abs(rec.before[k].omega);
  }
  const double er = scale_r > 0.0 ? std::abs(defect.vrho) / scale_r : std::abs(defect.vrho);
  const double ew = scale_w > 0.0 ? std::abs(defect.omega) / scale_w : std::abs(defect.omega);
  return std::max(er, ew);
}

WeakResiduals weak_level_integrand(const CellArray &cells, const BumpTestFunction &phi, int N, SourceModel source) {
  WeakResiduals r;
  const double t = cells.time;
  if (phi.amplitude == 0.0 || std::abs(t - phi.t_center) >= phi.t_radius) {
    return r;
  }
  const MassPrefix prefix = prefix_mass(cells);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const double x = cells.center(c);
    if (std::abs(x - phi.x_center) >= phi.x_radius) {
      continue;
    }
    const State v = cells[c];
    const double w = cells.width(c);
    const double p = phi.value(x, t);
    const double px = phi.dx(x, t);
    const double pt = phi.dt(x, t);
    const double u = v.omega / v.vrho;
    const double f2 = v.omega * u + v.vrho;
    double g2 = 0.0;
    if (source != SourceModel::none) {
      g2 = source_term(v, x, source == SourceModel::full ? prefix.at_center(c) : 0.0, N).omega;
    }
    const EntropyValue e = mechanical_entropy(v);
    r.mass += w * (v.vrho * pt + v.omega * px);
    r.momentum += w * (v.omega * pt + f2 * px + g2 * p);
    r.entropy += w * (e.eta * pt + e.q * px + u * g2 * p);
  }
  return r;
}

WeakResiduals weak_initial_term(const CellArray &initial, const BumpTestFunction &phi) {
  WeakResiduals r;
  if (phi.amplitude == 0.0) {
    return r;
  }
  for (std::size_t c = 0; c < initial.size(); ++c) {
    const double p = phi.value(initial.center(c), 0.0);
    if (p == 0.0) {
      continue;
    }
    const double w = initial.width(c) * p;
    r.mass += w * initial[c].vrho;
    r.momentum += w * initial[c].omega;
    r.entropy += w * mechanical_entropy(initial[c]).eta;
  }
  return r;
}

double boundary_trace_value(const CellArray &cells, double eps, int N) {
  const double hi = 1.0 + eps;
  double integral = 0.0;
  for (std::size_t c = 0; c < cells.size() && cells.left(c) < hi; ++c) {
    const double a = std::max(cells.left(c), 1.0);
    const double b = std::min(cells.right(c), hi);
    if (b > a) {
      integral += cells[c].omega * (inverse_area_primitive(b, N) - inverse_area_primitive(a, N));
    }
  }
  return integral / eps;
}

double consistency_sum(const Trajectory &traj) {
  double total = 0.0;
  for (const StepRecord &rec : traj.steps) {
    total += consistency_contribution(rec);
  }
  return total;
}

double entropy_production_total(const Trajectory &traj, const EntropyPair &pair) {
  double total = 0.0;
  for (const StepRecord &rec : traj.steps) {
    total += entropy_production_contribution(rec, pair);
  }
  return total;
}

WeakResiduals weak_residual(const Trajectory &traj, const BumpTestFunction &phi, int N, SourceModel source) {
  const CellArray &last = traj.steps.empty() ? traj.initial : traj.steps.back().after;
  require_support(phi, traj.initial.edges().front(), traj.initial.edges().back(), last.time);
  detail::TrapezoidSum sum;
  sum.add(weak_level_integrand(traj.initial, phi, N, source));
  for (const StepRecord &rec : traj.steps) {
    sum.add(weak_level_integrand(rec.after, phi, N, source));
  }
  const double h = traj.steps.empty() ? 0.0 : traj.steps.front().h;
  return sum.result(h, weak_initial_term(traj.initial, phi));
}

BoundaryTrace boundary_trace(const Trajectory &traj, double eps, int N) {
  const double l = traj.initial.spacing();
  if (!(eps >= 2.0 * l)) {
    throw PreconditionError(fmt::format("trace strip eps = {} is below the mesh resolution 2l = {}", eps, 2.0 * l));
  }
  BoundaryTrace trace;
  trace.series.emplace_back(traj.initial.time, boundary_trace_value(traj.initial, eps, N));
  for (const StepRecord &rec : traj.steps) {
    trace.series.emplace_back(rec.after.time, boundary_trace_value(rec.after, eps, N));
  }
  trace.time_average = trapezoid_average(trace.series);
  return trace;
}

namespace detail {

void TrapezoidSum::add(const WeakResiduals &level) {
  if (count_ == 0) {
    first_ = level;
  }
  last_ = level;
  sum_.mass += level.mass;
  sum_.momentum += level.momentum;
  sum_.entropy += level.entropy;
  ++count_;
}

WeakResiduals TrapezoidSum::result(double h, const WeakResiduals &initial) const {
  WeakResiduals r = initial;
  if (count_ >= 2) {
    r.mass += h * (sum_.mass - 0.5 * (first_.mass + last_.mass));
    r.momentum += h * (sum_.momentum - 0.5 * (first_.momentum + last_.momentum));
    r.entropy += h * (sum_.entropy - 0.5 * (first_.entropy + last_.entropy));
  }
  return r;
}

} // namespace detail

// Streaming accumulator.

DiagnosticsAccumulator::DiagnosticsAccumulator(const SchemeConfig &config, std::vector<EntropyPair> pairs,
                                               BumpTestFunction phi, double trace_eps)
    : config_(config), pairs_(std::move(pairs)), production_(pairs_.size(), 0.0), phi_(phi), trace_eps_(trace_eps),
      h_(config.h()), min_shock_production_(std::numeric_limits<double>::infinity()) {
  config_.validate();
  require_support(phi_, 1.0, 1.0 + config_.node_count() * config_.l, step_count(config_) * h_);
  if (!(trace_eps_ >= 2.0 * config_.l)) {
    throw PreconditionError(
        fmt::format("trace strip eps = {} is below the mesh resolution 2l = {}", trace_eps_, 2.0 * config_.l));
  }
}

StepObserver DiagnosticsAccumulator::observer() {
  return [this](const StepRecord &rec) { observe(rec); };
}

void DiagnosticsAccumulator::observe_level(const CellArray &cells, bool first) {
  if (first) {
    weak_initial_ = weak_initial_term(cells, phi_);
  }
  weak_sum_.add(weak_level_integrand(cells, phi_, config_.N, config_.source));
  trace_.emplace_back(cells.time, boundary_trace_value(cells, trace_eps_, config_.N));
}

void DiagnosticsAccumulator::observe(const StepRecord &rec) {
  if (!started_) {
    observe_level(rec.before, true);
    started_ = true;
  }
  consistency_ += consistency_contribution(rec);
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    production_[i] += entropy_production_contribution(rec, pairs_[i]);
  }
  min_shock_production_ = std::min(min_shock_production_, min_shock_entropy_production(rec));
  max_conservation_error_ = std::max(max_conservation_error_, step_conservation_error(rec));
  observe_level(rec.after, false);
}

DiagnosticsReport DiagnosticsAccumulator::finish(const RunResult &result) {
  if (!started_) {
    observe_level(result.initial, true);
    started_ = true;
  }
  DiagnosticsReport report;
  report.alpha0 = result.alpha0;
  report.C = result.C;
  report.l = config_.l;
  report.h = result.h;
  report.steps = result.steps;
  report.final_time = result.final_cells.time;
  report.bounds = result.bounds;
  report.bounds_passed = std::all_of(report.bounds.begin(), report.bounds.end(),
                                     [](const BoundReport &b) { return b.passed; });
  report.mass = result.mass;
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    report.entropy_production.emplace_back(pairs_[i].label(), production_[i]);
  }
  report.min_shock_production = std::isfinite(min_shock_production_) ? min_shock_production_ : 0.0;
  report.consistency_sum = consistency_;
  report.residuals = weak_sum_.result(h_, weak_initial_);
  report.test_function = phi_;
  report.trace_eps = trace_eps_;
  report.trace.series = trace_;
  report.trace.time_average = trapezoid_average(trace_);
  report.max_abs_lambda = result.max_abs_lambda;
  report.cfl_limit = config_.l / h_;
  report.max_step_conservation_error = max_conservation_error_;
  return report;
}

} // namespace sphgrav
