#include "sphgrav_cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "sphgrav/diagnostics.hpp"
#include "sphgrav/errors.hpp"

namespace sphgrav::cli {

namespace {

const std::vector<std::string> &known_keys() {
  static const std::vector<std::string> keys = {
      "N",
      "beta",
      "l",
      "T",
      "L_max",
      "seed",
      "snapshot_times",
      "spot_check_fraction",
      "initial.kind",
      "initial.amplitude",
      "initial.center",
      "initial.width",
      "initial.offset",
      "initial.velocity",
      "initial.file",
      "monitor.C",
      "monitor.alpha0",
      "monitor.tolerance",
      "monitor.abort",
      "scheme.source",
      "scheme.cutoff",
      "diagnostics.trace_eps",
      "diagnostics.xi",
      "converge.levels",
      "converge.slack",
  };
  return keys;
}

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) {
    ++a;
  }
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) {
    --b;
  }
  return std::string(s.substr(a, b - a));
}

// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string &line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') {
      quoted = !quoted;
    } else if (line[i] == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string unquote(const std::string &v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

double to_number(const std::string &key, const std::string &raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, raw));
  }
  return out;
}

int to_int(const std::string &key, const std::string &raw) {
  const double d = to_number(key, raw);
  if (d != std::floor(d) || std::abs(d) > 1e9) {
    throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, raw));
  }
  return static_cast<int>(d);
}

bool to_bool(const std::string &key, const std::string &raw) {
  const std::string v = unquote(trim(raw));
  if (v == "true") {
    return true;
  }
  if (v == "false") {
    return false;
  }
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, raw));
}

std::vector<double> to_array(const std::string &key, const std::string &raw) {
  const std::string v = trim(raw);
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
    throw ConfigError(fmt::format("{}: expected an array [a, b, ...], got '{}'", key, raw));
  }
  std::vector<double> out;
  const std::string body = trim(std::string_view(v).substr(1, v.size() - 2));
  if (body.empty()) {
    return out;
  }
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(to_number(key, item));
  }
  return out;
}

void apply(RunConfig &c, const std::string &key, const std::string &raw, const std::filesystem::path &base_dir) {
  SchemeConfig &s = c.scheme;
  if (key == "N") {
    s.N = to_int(key, raw);
  } else if (key == "beta") {
    s.beta = to_number(key, raw);
  } else if (key == "l") {
    s.l = to_number(key, raw);
  } else if (key == "T") {
    s.T = to_number(key, raw);
  } else if (key == "L_max") {
    s.L_max = to_number(key, raw);
  } else if (key == "seed") {
    const double d = to_number(key, raw);
    if (d < 0 || d != std::floor(d)) {
      throw ConfigError(fmt::format("seed: expected a nonnegative integer, got '{}'", raw));
    }
    s.seed = static_cast<std::uint64_t>(d);
  } else if (key == "snapshot_times") {
    c.snapshot_times = to_array(key, raw);
  } else if (key == "spot_check_fraction") {
    s.spot_check_fraction = to_number(key, raw);
  } else if (key == "initial.kind") {
    const std::string v = unquote(trim(raw));
    if (v == "floor") {
      c.initial.kind = InitialKind::floor;
    } else if (v == "gaussian_bump") {
      c.initial.kind = InitialKind::gaussian_bump;
    } else if (v == "table") {
      c.initial.kind = InitialKind::table;
    } else {
      throw ConfigError(fmt::format("initial.kind: expected floor, gaussian_bump or table, got '{}'", v));
    }
  } else if (key == "initial.amplitude") {
    c.initial.amplitude = to_number(key, raw);
  } else if (key == "initial.center") {
    c.initial.center = to_number(key, raw);
  } else if (key == "initial.width") {
    c.initial.width = to_number(key, raw);
  } else if (key == "initial.offset") {
    c.initial.offset = to_number(key, raw);
  } else if (key == "initial.velocity") {
    c.initial.velocity = to_number(key, raw);
  } else if (key == "initial.file") {
    std::filesystem::path p = unquote(trim(raw));
    c.initial.file = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  } else if (key == "monitor.C") {
    s.monitor_C = to_number(key, raw);
  } else if (key == "monitor.alpha0") {
    s.alpha0 = to_number(key, raw);
  } else if (key == "monitor.tolerance") {
    s.monitor_tolerance = to_number(key, raw);
  } else if (key == "monitor.abort") {
    s.abort_on_monitor = to_bool(key, raw);
  } else if (key == "scheme.source") {
    const std::string v = unquote(trim(raw));
    if (v == "full") {
      s.source = SourceModel::full;
    } else if (v == "geometric_only") {
      s.source = SourceModel::geometric_only;
    } else if (v == "none") {
      s.source = SourceModel::none;
    } else {
      throw ConfigError(fmt::format("scheme.source: expected full, geometric_only or none, got '{}'", v));
    }
  } else if (key == "scheme.cutoff") {
    s.cutoff = to_bool(key, raw);
  } else if (key == "diagnostics.trace_eps") {
    c.trace_eps = to_number(key, raw);
  } else if (key == "diagnostics.xi") {
    c.xi_grid = to_array(key, raw);
  } else if (key == "converge.levels") {
    c.levels = to_array(key, raw);
  } else if (key == "converge.slack") {
    c.slack = to_number(key, raw);
  } else {
    throw ConfigError(fmt::format("unknown config key '{}'", key));
  }
  c.resolved[key] = unquote(trim(raw));
}

} // namespace

std::string env_name(const std::string &key) {
  std::string out = "SPHGRAV_";
  for (char ch : key) {
    out += ch == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  return out;
}

EnvLookup process_env() {
  return [](const std::string &name) -> std::optional<std::string> {
    const char *v = std::getenv(name.c_str());
    if (v == nullptr) {
      return std::nullopt;
    }
    return std::string(v);
  };
}

RunConfig parse_config(const std::string &text, const EnvLookup &env, const std::filesystem::path &base_dir) {
  RunConfig c;
  c.xi_grid = default_xi_grid();
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value', got '{}'", lineno, body));
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(fmt::format("line {}: empty key or value", lineno));
    }
    if (!seen.insert(key).second) {
      throw ConfigError(fmt::format("line {}: duplicate key '{}'", lineno, key));
    }
    try {
      apply(c, key, value, base_dir);
    } catch (const ConfigError &e) {
      throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
    }
  }
  if (env) {
    for (const std::string &key : known_keys()) {
      if (auto v = env(env_name(key))) {
        try {
          apply(c, key, *v, std::filesystem::current_path());
        } catch (const ConfigError &e) {
          throw ConfigError(fmt::format("{}: {}", env_name(key), e.what()));
        }
      }
    }
  }
  if (c.initial.kind == InitialKind::table && c.initial.file.empty()) {
    throw ConfigError("initial.kind = table requires initial.file");
  }
  if (c.initial.kind == InitialKind::gaussian_bump && !(c.initial.width > 0.0)) {
    throw ConfigError("initial.width must be positive");
  }
  for (double t : c.snapshot_times) {
    if (!(t >= 0.0)) {
      throw ConfigError(fmt::format("snapshot_times: negative time {}", t));
    }
  }
  for (double xi : c.xi_grid) {
    if (!(std::abs(xi) < 1.0)) {
      throw ConfigError(fmt::format("diagnostics.xi: |xi| = {} must be below 1", std::abs(xi)));
    }
  }
  if (!(c.slack >= 1.0)) {
    throw ConfigError(fmt::format("converge.slack = {} must be at least 1", c.slack));
  }
  return c;
}

RunConfig load_config(const std::filesystem::path &path, const EnvLookup &env) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), env, path.parent_path());
}

namespace {

double interpolate(const std::vector<double> &x, const std::vector<double> &y, double s) {
  if (x.empty() || s > x.back()) {
    return 0.0;
  }
  const auto it = std::upper_bound(x.begin(), x.end(), s);
  if (it == x.begin()) {
    return y.front();
  }
  const std::size_t k = static_cast<std::size_t>(it - x.begin());
  if (k == x.size()) {
    return y.back();
  }
  const double t = (s - x[k - 1]) / (x[k] - x[k - 1]);
  return y[k - 1] + t * (y[k] - y[k - 1]);
}

} // namespace

double InitialTable::rho_at(double s) const { return interpolate(x, rho, s); }

double InitialTable::m_at(double s) const { return interpolate(x, m, s); }

InitialTable load_initial_table(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot read initial table '{}'", path.string()));
  }
  InitialTable table;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') {
      continue;
    }
    if (lineno == 1 && std::isalpha(static_cast<unsigned char>(body.front()))) {
      continue; // header
    }
    std::stringstream ss(body);
    std::string a;
    std::string b;
    std::string c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c)) {
      throw ConfigError(fmt::format("{}:{}: expected x,rho,m", path.string(), lineno));
    }
    try {
      table.x.push_back(to_number("x", a));
      table.rho.push_back(to_number("rho", b));
      table.m.push_back(to_number("m", c));
    } catch (const ConfigError &e) {
      throw ConfigError(fmt::format("{}:{}: {}", path.string(), lineno, e.what()));
    }
    if (table.rho.back() < 0.0) {
      throw ConfigError(fmt::format("{}:{}: negative density", path.string(), lineno));
    }
    if (table.x.size() > 1 && !(table.x.back() > table.x[table.x.size() - 2])) {
      throw ConfigError(fmt::format("{}:{}: x must be strictly increasing", path.string(), lineno));
    }
  }
  if (table.x.size() < 2) {
    throw ConfigError(fmt::format("{}: need at least two rows", path.string()));
  }
  return table;
}

void bind_initial_data(RunConfig &config) {
  SchemeConfig &s = config.scheme;
  const InitialSpec init = config.initial;
  const int N = s.N;
  switch (init.kind) {
  case InitialKind::floor:
    s.rho0 = [](double) { return 0.0; };
    s.m0 = [](double) { return 0.0; };
    break;
  case InitialKind::gaussian_bump: {
    auto rho = [init, N](double x) {
      const double d = (x - init.center) / init.width;
      return init.amplitude * std::exp(-d * d) * std::pow(x, 1 - N) + init.offset;
    };
    s.rho0 = rho;
    s.m0 = [rho, v = init.velocity](double x) { return v * rho(x); };
    break;
  }
  case InitialKind::table: {
    auto table = std::make_shared<const InitialTable>(load_initial_table(init.file));
    s.rho0 = [table](double x) { return table->rho_at(x); };
    s.m0 = [table](double x) { return table->m_at(x); };
    break;
  }
  }
}

} // namespace sphgrav::cli
