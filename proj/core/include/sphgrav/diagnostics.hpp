#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sphgrav/entropy.hpp"
#include "sphgrav/monitor.hpp"
#include "sphgrav/scheme.hpp"

namespace sphgrav {

/// Tensor product of Wendland C^2 quintic bumps
///   b(s) = (1 - |s|)^4 (4 |s| + 1) for |s| < 1, 0 otherwise,
///   phi(x, t) = amplitude * b((x - x_center)/x_radius) * b((t - t_center)/t_radius).
struct BumpTestFunction {
  double x_center = 3.0;
  double x_radius = 1.5;
  double t_center = 0.25;
  double t_radius = 0.225;
  double amplitude = 1.0;

  [[nodiscard]] double value(double x, double t) const;
  [[nodiscard]] double dx(double x, double t) const;
  [[nodiscard]] double dt(double x, double t) const;
};

/// The documented residual bump for final time T: centred at x = 3 with
/// radius 1.5, and at t = T/2 with radius 0.45 T.
[[nodiscard]] BumpTestFunction standard_bump(double T);

/// Monitored weak-entropy parameters {0, +-0.1, +-0.25, +-0.4, +-0.49}.
[[nodiscard]] std::vector<double> default_xi_grid();

struct WeakResiduals {
  double mass = 0.0;
  double momentum = 0.0;
  /// One-sided: the entropy inequality asks for entropy >= -tol.
  double entropy = 0.0;
};

struct BoundaryTrace {
  std::vector<std::pair<double, double>> series;
  double time_average = 0.0;
};

// Per-step kernels.

/// sum over the new cells of int (v(x, t_{i+1} - 0) - vbar)^2 dx, with both
/// components summed. Pieces between wave fronts are integrated exactly when
/// constant and with 16-point Gauss-Legendre inside rarefactions.
[[nodiscard]] double consistency_contribution(const StepRecord &rec);

/// h * sum over shocks inside the domain of (sigma [eta] - [q]).
[[nodiscard]] double entropy_production_contribution(const StepRecord &rec, const EntropyPair &pair);

/// Spatial midpoint sums at one time level: (mass, momentum, entropy)
/// integrands of the weak forms.
[[nodiscard]] WeakResiduals weak_level_integrand(const CellArray &cells, const BumpTestFunction &phi, int N,
                                                 SourceModel source);
/// int v0 phi(x, 0) dx for (vrho, omega, eta_e).
[[nodiscard]] WeakResiduals weak_initial_term(const CellArray &initial, const BumpTestFunction &phi);

/// (1/eps) int_1^{1+eps} m dx for piecewise-constant cell averages.
[[nodiscard]] double boundary_trace_value(const CellArray &cells, double eps, int N);

namespace detail {

/// Trapezoid rule in time over the levels t_0, ..., t_n of the weak forms.
class TrapezoidSum {
public:
  void add(const WeakResiduals &level);
  [[nodiscard]] WeakResiduals result(double h, const WeakResiduals &initial) const;

private:
  WeakResiduals sum_;
  WeakResiduals first_;
  WeakResiduals last_;
  std::size_t count_ = 0;
};

} // namespace detail

/// Stored trajectory: the initial array plus every step record.
struct Trajectory {
  CellArray initial;
  std::vector<StepRecord> steps;
};

[[nodiscard]] double consistency_sum(const Trajectory &traj);
[[nodiscard]] double entropy_production_total(const Trajectory &traj, const EntropyPair &pair);
/// Throws PreconditionError if phi is not supported in (1, L_max) x (0, T).
[[nodiscard]] WeakResiduals weak_residual(const Trajectory &traj, const BumpTestFunction &phi, int N,
                                          SourceModel source = SourceModel::full);
/// Throws PreconditionError if eps < 2 l.
[[nodiscard]] BoundaryTrace boundary_trace(const Trajectory &traj, double eps, int N);

struct DiagnosticsReport {
  double alpha0 = 0.0;
  double C = 0.0;
  double l = 0.0;
  double h = 0.0;
  std::size_t steps = 0;
  double final_time = 0.0;
  std::vector<BoundReport> bounds;
  bool bounds_passed = true;
  MassLedger mass;
  std::vector<std::pair<std::string, double>> entropy_production;
  double min_shock_production = 0.0;
  double consistency_sum = 0.0;
  WeakResiduals residuals;
  BumpTestFunction test_function;
  double trace_eps = 0.0;
  BoundaryTrace trace;
  double max_abs_lambda = 0.0;
  double cfl_limit = 0.0;
  double max_step_conservation_error = 0.0;
};

/// Streaming form of every diagnostic above; attach `observer()` to run()
/// and call `finish` with the run result. Produces the same numbers as the
/// trajectory functions, in the same summation order.
class DiagnosticsAccumulator {
public:
  DiagnosticsAccumulator(const SchemeConfig &config, std::vector<EntropyPair> pairs, BumpTestFunction phi,
                         double trace_eps);

  void observe(const StepRecord &rec);
  [[nodiscard]] StepObserver observer();
  [[nodiscard]] DiagnosticsReport finish(const RunResult &result);

private:
  void observe_level(const CellArray &cells, bool first);

  SchemeConfig config_;
  std::vector<EntropyPair> pairs_;
  std::vector<double> production_;
  BumpTestFunction phi_;
  double trace_eps_;
  double h_;
  bool started_ = false;
  double consistency_ = 0.0;
  double min_shock_production_ = 0.0;
  double max_conservation_error_ = 0.0;
  WeakResiduals weak_initial_;
  detail::TrapezoidSum weak_sum_;
  std::vector<std::pair<double, double>> trace_;
};

/// Relative defect of the homogeneous conservation identity for one step:
/// |sum width vbar_new - sum width vbar_old + (h f(right) - h f(wall))| / scale,
/// using the pre-source averages.
[[nodiscard]] double step_conservation_error(const StepRecord &rec);

/// Smallest mechanical entropy production over all shocks of one step.
[[nodiscard]] double min_shock_entropy_production(const StepRecord &rec);

} // namespace sphgrav
