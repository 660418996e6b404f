#include "sphgrav_cli/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "sphgrav/errors.hpp"
#include "sphgrav/gravity.hpp"
#include "sphgrav/scheme.hpp"

namespace sphgrav::cli {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_snapshot_csv(std::ostream &out, const CellArray &cells, int N) {
  const MassPrefix prefix = prefix_mass(cells);
  out << snapshot_header << '\n';
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const double x = cells.center(k);
    const State s = cells[k];
    const PhysicalState p = from_weighted(s, x, N);
    const Invariants inv = riemann_invariants(s);
    const double phi_x = -prefix.at_center(k) / area_weight(x, N);
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", x, p.rho, p.m, s.vrho,
                       s.omega, inv.w, inv.z, phi_x);
  }
}

void write_snapshot_csv(const std::filesystem::path &path, const CellArray &cells, int N) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  }
  write_snapshot_csv(out, cells, N);
}

CellArray read_snapshot_csv(const std::filesystem::path &path, int K, double l) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot read snapshot '{}'", path.string()));
  }
  std::string line;
  if (!std::getline(in, line) || line != snapshot_header) {
    throw ConfigError(fmt::format("{}: expected header '{}'", path.string(), snapshot_header));
  }
  std::vector<double> x;
  std::vector<State> values;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) {
      continue;
    }
    std::stringstream ss(line);
    std::string field;
    std::vector<double> row;
    while (std::getline(ss, field, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(field, &used));
        if (used != field.size()) {
          throw std::invalid_argument(field);
        }
      } catch (const std::exception &) {
        throw ConfigError(fmt::format("{}:{}: bad number '{}'", path.string(), lineno, field));
      }
    }
    if (row.size() != 8) {
      throw ConfigError(fmt::format("{}:{}: expected 8 columns, got {}", path.string(), lineno, row.size()));
    }
    x.push_back(row[0]);
    values.push_back({row[3], row[4]});
  }
  for (Parity parity : {Parity::even, Parity::odd}) {
    CellArray layout = make_layout(parity, K, l, State{1.0, 0.0});
    if (layout.size() != x.size()) {
      continue;
    }
    bool match = true;
    for (std::size_t k = 0; k < x.size() && match; ++k) {
      match = std::abs(layout.center(k) - x[k]) <= 1e-9 * std::max(1.0, std::abs(x[k]));
    }
    if (match) {
      CellArray cells(layout.edges(), values);
      cells.set_nodes(layout.nodes(), layout.spacing());
      cells.parity = parity;
      return cells;
    }
  }
  throw ConfigError(fmt::format("{}: cell centres match neither staggered layout for l = {}", path.string(), l));
}

nlohmann::json to_json(const BoundReport &b) {
  return {{"time", b.time},         {"sup_w", b.sup_w},       {"inf_z", b.inf_z},
          {"min_vrho", b.min_vrho}, {"max_vrho", b.max_vrho}, {"w_limit", b.w_limit},
          {"z_limit", b.z_limit},   {"passed", b.passed}};
}

nlohmann::json to_json(const MassLedger &m) {
  return {{"initial", m.initial},
          {"final", m.final},
          {"cutoff_injection", m.cutoff_injection},
          {"right_outflow", m.right_outflow},
          {"wall_outflow", m.wall_outflow},
          {"imbalance", m.imbalance()}};
}

nlohmann::json to_json(const DiagnosticsReport &r, bool with_residuals) {
  nlohmann::json j;
  j["l"] = r.l;
  j["h"] = r.h;
  j["steps"] = r.steps;
  j["final_time"] = r.final_time;
  j["alpha0"] = r.alpha0;
  j["C"] = r.C;

  // Columnar per-level bounds keep the file compact.
  nlohmann::json bounds;
  std::vector<double> time;
  std::vector<double> sup_w;
  std::vector<double> inf_z;
  std::vector<double> min_vrho;
  std::vector<double> max_vrho;
  double worst_sup_w = -INFINITY;
  double worst_inf_z = INFINITY;
  for (const BoundReport &b : r.bounds) {
    time.push_back(b.time);
    sup_w.push_back(b.sup_w);
    inf_z.push_back(b.inf_z);
    min_vrho.push_back(b.min_vrho);
    max_vrho.push_back(b.max_vrho);
    worst_sup_w = std::max(worst_sup_w, b.sup_w);
    worst_inf_z = std::min(worst_inf_z, b.inf_z);
  }
  bounds["passed"] = r.bounds_passed;
  bounds["sup_w_max"] = r.bounds.empty() ? 0.0 : worst_sup_w;
  bounds["inf_z_min"] = r.bounds.empty() ? 0.0 : worst_inf_z;
  bounds["time"] = time;
  bounds["sup_w"] = sup_w;
  bounds["inf_z"] = inf_z;
  bounds["min_vrho"] = min_vrho;
  bounds["max_vrho"] = max_vrho;
  j["bounds"] = bounds;

  j["mass"] = to_json(r.mass);
  nlohmann::json prod = nlohmann::json::object();
  for (const auto &[label, value] : r.entropy_production) {
    prod[label] = value;
  }
  j["entropy_production"] = prod;
  j["min_shock_production"] = r.min_shock_production;
  j["consistency_sum"] = r.consistency_sum;
  if (with_residuals) {
    j["residuals"] = {{"mass", r.residuals.mass},
                      {"momentum", r.residuals.momentum},
                      {"entropy", r.residuals.entropy},
                      {"test_function",
                       {{"x_center", r.test_function.x_center},
                        {"x_radius", r.test_function.x_radius},
                        {"t_center", r.test_function.t_center},
                        {"t_radius", r.test_function.t_radius}}}};
  } else {
    j["residuals"] = nullptr;
  }
  std::vector<double> trace_t;
  std::vector<double> trace_v;
  for (const auto &[t, v] : r.trace.series) {
    trace_t.push_back(t);
    trace_v.push_back(v);
  }
  j["boundary_trace"] = {
      {"eps", r.trace_eps}, {"time_average", r.trace.time_average}, {"time", trace_t}, {"value", trace_v}};
  j["cfl"] = {{"max_abs_lambda", r.max_abs_lambda}, {"limit", r.cfl_limit}, {"passed", r.max_abs_lambda < r.cfl_limit}};
  j["max_step_conservation_error"] = r.max_step_conservation_error;
  return j;
}

namespace {

nlohmann::json state_json(State s) {
  nlohmann::json j = {{"vrho", s.vrho}, {"omega", s.omega}};
  j["u"] = s.vrho > 0.0 ? s.omega / s.vrho : 0.0;
  return j;
}

} // namespace

nlohmann::json to_json(const WaveFan &fan) {
  nlohmann::json waves = nlohmann::json::array();
  for (const Wave &w : fan.waves()) {
    waves.push_back({{"family", w.family},
                     {"kind", w.is_shock() ? "shock" : "rarefaction"},
                     {"speed_lo", w.speed_lo},
                     {"speed_hi", w.speed_hi}});
  }
  return {{"boundary", fan.is_boundary},
          {"left", state_json(fan.left)},
          {"middle", state_json(fan.middle)},
          {"right", state_json(fan.right)},
          {"waves", waves}};
}

void write_json(const std::filesystem::path &path, const nlohmann::json &j) {
  std::ofstream out(path);
  if (!out) {
    throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  }
  out << j.dump(2) << '\n';
}

void describe_fan(std::ostream &out, const WaveFan &fan) {
  const auto u = [](State s) { return s.omega / s.vrho; };
  if (fan.is_constant()) {
    out << fmt::format("constant solution: vrho={:.17g} u={:.17g}\n", fan.middle.vrho, u(fan.middle));
    return;
  }
  for (const Wave &w : fan.waves()) {
    if (w.is_shock()) {
      out << fmt::format("{}-shock: speed={:.17g}\n", w.family, w.speed_lo);
    } else {
      out << fmt::format("{}-rarefaction: speeds=[{:.17g}, {:.17g}]\n", w.family, w.speed_lo, w.speed_hi);
    }
  }
  out << fmt::format("{}: vrho={:.17g} u={:.17g}\n", fan.is_boundary ? "wall state" : "middle state", fan.middle.vrho,
                     u(fan.middle));
}

} // namespace sphgrav::cli
