#include <cmath>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "sphgrav/errors.hpp"
#include "sphgrav_cli/commands.hpp"
#include "sphgrav_cli/io.hpp"

using namespace sphgrav;
using namespace sphgrav::cli;
namespace fs = std::filesystem;

namespace {

EnvLookup no_env() {
  return [](const std::string &) -> std::optional<std::string> { return std::nullopt; };
}

fs::path data(const char *name) { return fs::path(SPHGRAV_TEST_DATA_DIR) / name; }

fs::path fresh_dir(const std::string &name) {
  const fs::path p = fs::temp_directory_path() / ("sphgrav_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_guarded(const std::function<int()> &body) {
  std::ostringstream err;
  return run_command(body, err);
}

} // namespace

TEST(Riemann, TwoShockCollision) {
  RiemannOptions opt;
  opt.left = {1, 1};
  opt.right = {1, -1};
  std::ostringstream out;
  EXPECT_EQ(cmd_riemann(opt, out), exit_ok);
  EXPECT_NE(out.str().find("1-shock"), std::string::npos);
  EXPECT_NE(out.str().find("2-shock"), std::string::npos);
  EXPECT_NE(out.str().find("middle state: vrho=2.61803398874989"), std::string::npos);
}

TEST(Riemann, JsonAndProfile) {
  const fs::path dir = fresh_dir("riemann");
  RiemannOptions opt;
  opt.left = {1, -1};
  opt.right = {1, 1};
  opt.json = true;
  opt.profile = dir / "profile.csv";
  opt.samples = 11;
  std::ostringstream out;
  ASSERT_EQ(cmd_riemann(opt, out), exit_ok);
  const auto j = nlohmann::json::parse(out.str());
  EXPECT_EQ(j.at("waves").size(), 2u);
  std::ifstream in(dir / "profile.csv");
  std::string line;
  int rows = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "xi,vrho,omega,u,w,z");
  while (std::getline(in, line)) {
    ++rows;
  }
  EXPECT_EQ(rows, 11);
}

TEST(Riemann, WallAndErrors) {
  RiemannOptions opt;
  opt.wall = true;
  opt.right = {1, -1};
  std::ostringstream out;
  EXPECT_EQ(cmd_riemann(opt, out), exit_ok);
  EXPECT_NE(out.str().find("wall state"), std::string::npos);

  RiemannOptions bad;
  bad.left = {0, 1};
  bad.right = {1, 0};
  EXPECT_EQ(run_guarded([&] { return cmd_riemann(bad, out); }), exit_config);
  bad.left = {1, 0};
  bad.wall = true;
  EXPECT_EQ(run_guarded([&] { return cmd_riemann(bad, out); }), exit_config);
}

TEST(Run, FloorRunWritesOutputs) {
  const fs::path dir = fresh_dir("floor");
  RunOptions opt{data("floor.toml"), dir, std::nullopt};
  std::ostringstream out;
  ASSERT_EQ(cmd_run(opt, no_env(), out), exit_ok);
  EXPECT_TRUE(fs::exists(dir / "snapshot_000.csv"));
  EXPECT_FALSE(fs::exists(dir / "snapshot_001.csv"));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest.at("derived").at("steps"), 10);
  const auto diag = nlohmann::json::parse(slurp(dir / "diagnostics.json"));
  EXPECT_TRUE(diag.at("bounds").at("passed").get<bool>());
}

TEST(Run, ExitCodes) {
  const fs::path dir = fresh_dir("codes");
  std::ostringstream err;
  EXPECT_EQ(run_command([&] { return cmd_run({dir / "absent.toml", dir, {}}, no_env(), err); }, err), exit_config);
  EXPECT_NE(err.str().find("absent.toml"), std::string::npos);
  EXPECT_EQ(run_guarded([&] { return cmd_run({data("cfl_violation.toml"), dir, {}}, no_env(), err); }), exit_cfl);
  EXPECT_EQ(run_guarded([&] { return cmd_run({data("monitor_abort.toml"), dir, {}}, no_env(), err); }),
            exit_monitor);
}

TEST(Run, OutputsAreDeterministic) {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  std::ostringstream out;
  const std::vector<double> times{0.005, 0.01};
  ASSERT_EQ(cmd_run({data("floor.toml"), a, times}, no_env(), out), exit_ok);
  ASSERT_EQ(cmd_run({data("floor.toml"), b, times}, no_env(), out), exit_ok);
  for (const char *f : {"snapshot_000.csv", "snapshot_001.csv", "diagnostics.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Run, GaussianOutputsAreDeterministic) {
  RunConfig c = load_config(data("gaussian.toml"), no_env());
  c.scheme.l = 0.05;
  c.scheme.T = 0.1;
  const RunOutput x = execute(c);
  const RunOutput y = execute(c);
  EXPECT_EQ(to_json(x.report, x.residuals_valid).dump(), to_json(y.report, y.residuals_valid).dump());
  EXPECT_EQ(x.result.final_cells.values(), y.result.final_cells.values());
}

TEST(Snapshot, RoundTrip) {
  RunConfig c = load_config(data("gaussian.toml"), no_env());
  c.scheme.l = 0.05;
  c.scheme.T = 0.05;
  const RunOutput o = execute(c, {0.0, 0.02});
  const fs::path dir = fresh_dir("snap");
  for (std::size_t i = 0; i < o.result.snapshots.size(); ++i) {
    const CellArray &s = o.result.snapshots[i];
    const fs::path p = dir / ("s" + std::to_string(i) + ".csv");
    write_snapshot_csv(p, s, c.scheme.N);
    const CellArray r = read_snapshot_csv(p, c.scheme.node_count(), c.scheme.l);
    EXPECT_EQ(r.parity, s.parity);
    EXPECT_EQ(r.values(), s.values());
    EXPECT_EQ(r.edges(), s.edges());
  }
}

TEST(Diagnose, SnapshotOfARun) {
  const fs::path dir = fresh_dir("diagnose");
  std::ostringstream out;
  ASSERT_EQ(cmd_run({data("floor.toml"), dir, std::vector<double>{0.013}}, no_env(), out), exit_ok);
  DiagnoseOptions opt;
  opt.config = data("floor.toml");
  opt.snapshot = dir / "snapshot_000.csv";
  opt.time = 0.013;
  std::ostringstream js;
  ASSERT_EQ(cmd_diagnose(opt, no_env(), js), exit_ok);
  const auto j = nlohmann::json::parse(js.str());
  EXPECT_TRUE(j.at("bounds").at("passed").get<bool>());
  EXPECT_GT(j.at("weighted_mass").get<double>(), 0.0);
}

TEST(Converge, Levels) {
  RunConfig c = load_config(data("floor.toml"), no_env());
  c.scheme.source = SourceModel::none;
  EXPECT_THROW((void)converge(c, {0.05, 0.05}, 1.0), ConfigError);
  EXPECT_THROW((void)converge(c, {0.05}, 1.0), ConfigError);
  EXPECT_THROW((void)converge(c, {0.05, 0.025}, 0.5), ConfigError);
  const ConvergenceTable t = converge(c, {0.05, 0.025}, 1.0);
  ASSERT_EQ(t.rows.size(), 2u);
  ASSERT_TRUE(t.rows[0].l1_to_next.has_value());
  // Only the floor densities l^3 differ, over a domain of length 4.
  EXPECT_NEAR(*t.rows[0].l1_to_next, 4.0 * (std::pow(0.05, 3) - std::pow(0.025, 3)), 1e-15);
  EXPECT_FALSE(t.rows[1].l1_to_next.has_value());
}

TEST(Reaverage, ConservesMassAndIsExactOnNestedGrids) {
  const CellArray fine(std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0},
                       std::vector<State>{{1, 0}, {2, 0}, {3, 0}, {4, 0}});
  const std::vector<double> coarse{1.0, 2.0, 3.0};
  const std::vector<double> r = reaverage_density(fine, coarse);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(r[0], 1.5);
  EXPECT_DOUBLE_EQ(r[1], 3.5);
  const std::vector<double> odd{1.0, 1.75, 3.0};
  const std::vector<double> q = reaverage_density(fine, odd);
  EXPECT_NEAR(0.75 * q[0] + 1.25 * q[1], fine.integral().vrho, 1e-14);
  EXPECT_DOUBLE_EQ(l1_distance(coarse, {1, 2}, {2, 0}), 3.0);
}
