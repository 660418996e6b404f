#include "sphgrav_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "sphgrav/errors.hpp"
#include "sphgrav/gravity.hpp"
#include "sphgrav_cli/io.hpp"

#ifndef SPHGRAV_VERSION
#define SPHGRAV_VERSION "unknown"
#endif

namespace sphgrav::cli {

namespace {

bool bump_fits(const BumpTestFunction &phi, double L_max, double t_final) {
  return phi.t_radius > 0.0 && phi.x_center - phi.x_radius > 1.0 && phi.x_center + phi.x_radius < L_max &&
         phi.t_center - phi.t_radius > 0.0 && phi.t_center + phi.t_radius < t_final;
}

std::vector<EntropyPair> monitored_pairs(const std::vector<double> &xi_grid) {
  std::vector<EntropyPair> pairs{EntropyPair::mechanical()};
  for (double xi : xi_grid) {
    pairs.push_back(EntropyPair::weak(xi));
  }
  return pairs;
}

double trace_width(const RunConfig &config) {
  if (config.trace_eps) {
    if (!(*config.trace_eps >= 2.0 * config.scheme.l)) {
      throw ConfigError(fmt::format("diagnostics.trace_eps = {} is below 2l = {}", *config.trace_eps,
                                    2.0 * config.scheme.l));
    }
    return *config.trace_eps;
  }
  return std::max(0.1, 2.0 * config.scheme.l);
}

std::filesystem::path ensure_dir(const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw ConfigError(fmt::format("cannot create output directory '{}'", dir.string()));
  }
  return dir;
}

} // namespace

int run_command(const std::function<int()> &body, std::ostream &err) {
  try {
    return body();
  } catch (const CflError &e) {
    err << "error: CFL violation: " << e.what() << '\n';
    return exit_cfl;
  } catch (const InvariantViolation &e) {
    err << "error: invariant monitor: " << e.what() << '\n';
    return exit_monitor;
  } catch (const ConfigError &e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const DomainError &e) {
    err << "error: invalid state: " << e.what() << '\n';
    return exit_config;
  } catch (const PreconditionError &e) {
    err << "error: " << e.what() << '\n';
    return exit_config;
  }
}

RunOutput execute(RunConfig config, const std::vector<double> &snapshot_times) {
  bind_initial_data(config);
  const SchemeConfig &s = config.scheme;
  s.validate();
  const double t_final = static_cast<double>(step_count(s)) * s.h();
  BumpTestFunction phi = standard_bump(s.T);
  const bool fits = bump_fits(phi, s.L_max, t_final);
  if (!fits) {
    phi.amplitude = 0.0;
  }
  DiagnosticsAccumulator acc(s, monitored_pairs(config.xi_grid), phi, trace_width(config));
  const StepObserver obs = acc.observer();
  RunOutput out;
  out.result = run(s, std::span<const StepObserver>(&obs, 1), snapshot_times);
  out.report = acc.finish(out.result);
  out.residuals_valid = fits;
  return out;
}

std::vector<double> reaverage_density(const CellArray &fine, const std::vector<double> &edges) {
  std::vector<double> out(edges.size() - 1, 0.0);
  std::size_t k = 0;
  for (std::size_t c = 0; c + 1 < edges.size(); ++c) {
    const double a = edges[c];
    const double b = edges[c + 1];
    while (k < fine.size() && fine.right(k) <= a) {
      ++k;
    }
    double integral = 0.0;
    for (std::size_t j = k; j < fine.size() && fine.left(j) < b; ++j) {
      const double lo = std::max(a, fine.left(j));
      const double hi = std::min(b, fine.right(j));
      if (hi > lo) {
        integral += (hi - lo) * fine[j].vrho;
      }
    }
    out[c] = integral / (b - a);
  }
  return out;
}

double l1_distance(const std::vector<double> &edges, const std::vector<double> &a, const std::vector<double> &b) {
  double sum = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) {
    sum += (edges[c + 1] - edges[c]) * std::abs(a[c] - b[c]);
  }
  return sum;
}

ConvergenceTable converge(const RunConfig &config, const std::vector<double> &levels, double slack) {
  if (levels.size() < 2) {
    throw ConfigError("converge needs at least two levels");
  }
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i] < levels[i - 1])) {
      throw ConfigError(fmt::format("levels must be strictly decreasing, got {} then {}", levels[i - 1], levels[i]));
    }
  }
  if (!(slack >= 1.0)) {
    throw ConfigError(fmt::format("slack = {} must be at least 1", slack));
  }
  // Validate every level before spending time on any run.
  for (double l : levels) {
    RunConfig c = config;
    c.scheme.l = l;
    bind_initial_data(c);
    c.scheme.validate();
  }

  ConvergenceTable table;
  std::vector<double> coarse_edges;
  std::vector<std::vector<double>> densities;
  for (double l : levels) {
    RunConfig c = config;
    c.scheme.l = l;
    const RunOutput run_out = execute(c);
    const RunResult &res = run_out.result;
    if (coarse_edges.empty()) {
      coarse_edges = res.final_cells.edges();
    }
    densities.push_back(reaverage_density(res.final_cells, coarse_edges));

    ConvergenceRow row;
    row.l = l;
    row.h = res.h;
    row.steps = res.steps;
    row.final_time = res.final_cells.time;
    if (run_out.residuals_valid) {
      row.residuals = run_out.report.residuals;
    }
    row.consistency_sum = run_out.report.consistency_sum;
    row.alpha0 = res.alpha0;
    for (const BoundReport &b : res.bounds) {
      row.max_invariant_excess = std::max(row.max_invariant_excess, std::max(b.sup_w, -b.inf_z) - res.alpha0);
      row.max_vrho = std::max(row.max_vrho, b.max_vrho);
    }
    table.rows.push_back(row);
  }
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    table.rows[i].l1_to_next = l1_distance(coarse_edges, densities[i], densities[i + 1]);
  }

  const auto check = [&](const char *name, double prev, double next, double l_prev, double l_next) {
    if (next > slack * prev) {
      table.monotone = false;
      table.violations.push_back(
          fmt::format("{} grew from {:.6g} (l={}) to {:.6g} (l={})", name, prev, l_prev, next, l_next));
    }
  };
  for (std::size_t i = 1; i + 1 < levels.size(); ++i) {
    check("L1 difference", *table.rows[i - 1].l1_to_next, *table.rows[i].l1_to_next, levels[i - 1], levels[i]);
  }
  for (std::size_t i = 1; i < levels.size(); ++i) {
    const auto &a = table.rows[i - 1].residuals;
    const auto &b = table.rows[i].residuals;
    if (a && b) {
      check("|r_mass|", std::abs(a->mass), std::abs(b->mass), levels[i - 1], levels[i]);
      check("|r_momentum|", std::abs(a->momentum), std::abs(b->momentum), levels[i - 1], levels[i]);
    }
  }
  return table;
}

int cmd_run(const RunOptions &opt, const EnvLookup &env, std::ostream &out) {
  RunConfig config = load_config(opt.config, env);
  if (opt.snapshot_times) {
    config.snapshot_times = *opt.snapshot_times;
    config.resolved["snapshot_times"] = fmt::format("[{}]", fmt::join(*opt.snapshot_times, ", "));
  }
  std::vector<double> times = config.snapshot_times;
  if (times.empty()) {
    times.push_back(config.scheme.T);
  }
  const auto dir = ensure_dir(opt.out_dir);

  const auto start = std::chrono::steady_clock::now();
  const RunOutput run_out = execute(config, times);
  const double wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const RunResult &res = run_out.result;
  const DiagnosticsReport &rep = run_out.report;

  nlohmann::json snapshots = nlohmann::json::array();
  for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
    const std::string name = fmt::format("snapshot_{:03d}.csv", i);
    write_snapshot_csv(dir / name, res.snapshots[i], config.scheme.N);
    snapshots.push_back({{"file", name},
                         {"requested_time", i < times.size() ? times[i] : config.scheme.T},
                         {"time", res.snapshots[i].time},
                         {"step", res.snapshots[i].step_index}});
  }
  const nlohmann::json diag = to_json(rep, run_out.residuals_valid);
  write_json(dir / "diagnostics.json", diag);

  nlohmann::json manifest;
  manifest["version"] = SPHGRAV_VERSION;
  manifest["config"] = config.resolved;
  manifest["derived"] = {{"h", rep.h},
                         {"K", config.scheme.node_count()},
                         {"floor_density", config.scheme.floor_density()},
                         {"alpha0", rep.alpha0},
                         {"C", rep.C},
                         {"steps", rep.steps},
                         {"final_time", rep.final_time},
                         {"trace_eps", rep.trace_eps}};
  manifest["wall_clock_seconds"] = wall_clock;
  manifest["outputs"] = {{"snapshots", snapshots}, {"diagnostics", "diagnostics.json"}};
  manifest["digest"] = {{"bounds_passed", rep.bounds_passed},
                        {"cfl_passed", rep.max_abs_lambda < rep.cfl_limit},
                        {"mass_imbalance", rep.mass.imbalance()},
                        {"cutoff_injection", rep.mass.cutoff_injection},
                        {"consistency_sum", rep.consistency_sum},
                        {"min_shock_production", rep.min_shock_production},
                        {"residuals", diag["residuals"]}};
  write_json(dir / "manifest.json", manifest);

  out << fmt::format("steps={} final_time={:.17g} h={:.17g}\n", rep.steps, rep.final_time, rep.h);
  out << fmt::format("alpha0={:.17g} C={:.17g} bounds_passed={}\n", rep.alpha0, rep.C, rep.bounds_passed);
  out << fmt::format("mass initial={:.17g} final={:.17g} cutoff_injection={:.17g} right_outflow={:.17g}\n",
                     rep.mass.initial, rep.mass.final, rep.mass.cutoff_injection, rep.mass.right_outflow);
  out << fmt::format("wrote {} snapshot(s), diagnostics.json, manifest.json to {}\n", res.snapshots.size(),
                     dir.string());
  return exit_ok;
}

int cmd_riemann(const RiemannOptions &opt, std::ostream &out) {
  const auto parse_state = [](const std::vector<double> &v, const char *name) {
    if (v.size() != 2) {
      throw ConfigError(fmt::format("--{} expects two values: density,velocity", name));
    }
    if (!(v[0] > 0.0) || !std::isfinite(v[0]) || !std::isfinite(v[1])) {
      throw DomainError(fmt::format("--{} density must be positive and finite, got {}", name, v[0]));
    }
    return from_density_velocity(v[0], v[1]);
  };
  const State right = parse_state(opt.right, "right");
  WaveFan fan;
  if (opt.wall) {
    if (!opt.left.empty()) {
      throw ConfigError("--wall takes only --right");
    }
    fan = solve_boundary_riemann(right);
  } else {
    fan = solve_riemann(parse_state(opt.left, "left"), right);
  }
  if (opt.json) {
    out << to_json(fan).dump(2) << '\n';
  } else {
    describe_fan(out, fan);
  }
  if (opt.profile) {
    if (opt.samples < 2 || !(opt.xi_max > opt.xi_min)) {
      throw ConfigError("profile needs at least two samples and xi_max > xi_min");
    }
    const double lo = opt.wall ? std::max(0.0, opt.xi_min) : opt.xi_min;
    if (!(opt.xi_max > lo)) {
      throw ConfigError("wall profiles need xi_max > 0");
    }
    std::ofstream csv(*opt.profile);
    if (!csv) {
      throw ConfigError(fmt::format("cannot write '{}'", opt.profile->string()));
    }
    csv << "xi,vrho,omega,u,w,z\n";
    for (int i = 0; i < opt.samples; ++i) {
      const double xi = lo + (opt.xi_max - lo) * i / (opt.samples - 1);
      const State s = sample(fan, xi);
      const Invariants inv = riemann_invariants(s);
      csv << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", xi, s.vrho, s.omega, s.omega / s.vrho,
                         inv.w, inv.z);
    }
  }
  return exit_ok;
}

int cmd_converge(const ConvergeOptions &opt, const EnvLookup &env, std::ostream &out) {
  const RunConfig config = load_config(opt.config, env);
  const std::vector<double> levels = opt.levels ? *opt.levels : config.levels;
  const double slack = opt.slack ? *opt.slack : config.slack;
  const auto dir = ensure_dir(opt.out_dir);
  const ConvergenceTable table = converge(config, levels, slack);

  std::ofstream csv(dir / "convergence.csv");
  if (!csv) {
    throw ConfigError(fmt::format("cannot write '{}'", (dir / "convergence.csv").string()));
  }
  const auto opt_str = [](std::optional<double> v) { return v ? format_double(*v) : std::string(); };
  csv << "l,h,steps,final_time,l1_to_next,r_mass,r_momentum,r_entropy,consistency_sum,alpha0,max_invariant_excess,"
         "max_vrho\n";
  out << fmt::format("{:>12} {:>8} {:>14} {:>14} {:>14} {:>14} {:>14}\n", "l", "steps", "L1_to_next", "r_mass",
                     "r_momentum", "r_entropy", "consistency");
  nlohmann::json rows = nlohmann::json::array();
  for (const ConvergenceRow &r : table.rows) {
    const auto res = r.residuals;
    csv << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", format_double(r.l), format_double(r.h), r.steps,
                       format_double(r.final_time), opt_str(r.l1_to_next),
                       opt_str(res ? std::optional(res->mass) : std::nullopt),
                       opt_str(res ? std::optional(res->momentum) : std::nullopt),
                       opt_str(res ? std::optional(res->entropy) : std::nullopt), format_double(r.consistency_sum),
                       format_double(r.alpha0), format_double(r.max_invariant_excess), format_double(r.max_vrho));
    out << fmt::format("{:>12.6g} {:>8} {:>14} {:>14} {:>14} {:>14} {:>14.6g}\n", r.l, r.steps,
                       r.l1_to_next ? fmt::format("{:.6g}", *r.l1_to_next) : "-",
                       res ? fmt::format("{:.6g}", res->mass) : "-", res ? fmt::format("{:.6g}", res->momentum) : "-",
                       res ? fmt::format("{:.6g}", res->entropy) : "-", r.consistency_sum);
    nlohmann::json row = {{"l", r.l},
                          {"h", r.h},
                          {"steps", r.steps},
                          {"final_time", r.final_time},
                          {"consistency_sum", r.consistency_sum},
                          {"alpha0", r.alpha0},
                          {"max_invariant_excess", r.max_invariant_excess},
                          {"max_vrho", r.max_vrho}};
    row["l1_to_next"] = r.l1_to_next ? nlohmann::json(*r.l1_to_next) : nlohmann::json(nullptr);
    row["residuals"] = res ? nlohmann::json{{"mass", res->mass}, {"momentum", res->momentum}, {"entropy", res->entropy}}
                           : nlohmann::json(nullptr);
    rows.push_back(row);
  }
  write_json(dir / "convergence.json",
             {{"slack", slack}, {"monotone", table.monotone}, {"violations", table.violations}, {"levels", rows}});
  for (const std::string &v : table.violations) {
    out << "not monotone: " << v << '\n';
  }
  out << (table.monotone ? "monotone: yes\n" : "monotone: no\n");
  return table.monotone ? exit_ok : exit_check_failed;
}

int cmd_diagnose(const DiagnoseOptions &opt, const EnvLookup &env, std::ostream &out) {
  RunConfig config = load_config(opt.config, env);
  bind_initial_data(config);
  const SchemeConfig &s = config.scheme;
  s.validate();
  CellArray cells = read_snapshot_csv(opt.snapshot, s.node_count(), s.l);
  cells.time = opt.time;

  const CellArray initial = init_cells(s);
  const double alpha0 = s.alpha0 ? *s.alpha0 : invariant_bound(initial);
  const double C = s.monitor_C ? *s.monitor_C : default_monitor_C(initial, s.N);
  const BoundReport bounds = monitor_bounds(cells, alpha0, C, opt.time, s.monitor_tolerance);
  const double eps = trace_width(config);
  double eta_total = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    eta_total += cells.width(k) * mechanical_entropy(cells[k]).eta;
  }
  const double lambda = max_characteristic_speed(cells);

  nlohmann::json j;
  j["time"] = opt.time;
  j["cells"] = cells.size();
  j["parity"] = cells.parity == Parity::even ? "even" : "odd";
  j["alpha0"] = alpha0;
  j["C"] = C;
  j["bounds"] = to_json(bounds);
  j["weighted_mass"] = cells.integral().vrho;
  j["total_mass"] = total_mass(cells, s.N);
  j["weighted_momentum"] = cells.integral().omega;
  j["mechanical_entropy"] = eta_total;
  j["floor_density"] = s.floor_density();
  j["boundary_trace"] = {{"eps", eps}, {"value", boundary_trace_value(cells, eps, s.N)}};
  j["cfl"] = {{"max_abs_lambda", lambda}, {"limit", s.l / s.h()}, {"passed", cfl_check(cells, s.l, s.h())}};
  if (opt.output) {
    write_json(*opt.output, j);
  } else {
    out << j.dump(2) << '\n';
  }
  return bounds.passed ? exit_ok : exit_monitor;
}

} // namespace sphgrav::cli
