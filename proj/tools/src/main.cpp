#include <iostream>

#include <CLI/CLI.hpp>

#include "sphgrav_cli/commands.hpp"

int main(int argc, char **argv) {
  using namespace sphgrav::cli;

  CLI::App app{"Spherically symmetric isothermal Euler-Poisson flow outside the unit ball"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SPHGRAV_VERSION);

  RunOptions run_opt;
  std::vector<double> run_times;
  auto *run = app.add_subcommand("run", "Run the scheme and write snapshots, diagnostics and a manifest");
  run->add_option("-c,--config", run_opt.config, "Config file")->required();
  run->add_option("-o,--out-dir", run_opt.out_dir, "Output directory")->capture_default_str();
  run->add_option("--snapshot-times", run_times, "Snapshot times (overrides the config)")->delimiter(',');

  RiemannOptions rp_opt;
  std::string profile;
  auto *riemann = app.add_subcommand("riemann", "Solve one Riemann problem; states are density,velocity");
  riemann->add_option("--left", rp_opt.left, "Left state rho,u")->delimiter(',')->expected(2);
  riemann->add_option("--right", rp_opt.right, "Right state rho,u")->delimiter(',')->expected(2)->required();
  riemann->add_flag("--wall", rp_opt.wall, "Reflecting wall on the left (omega = 0)");
  riemann->add_option("--profile", profile, "Write sampled states over a xi grid to this CSV");
  riemann->add_option("--xi-min", rp_opt.xi_min)->capture_default_str();
  riemann->add_option("--xi-max", rp_opt.xi_max)->capture_default_str();
  riemann->add_option("--samples", rp_opt.samples)->capture_default_str();
  riemann->add_flag("--json", rp_opt.json, "Print the fan as JSON");

  ConvergeOptions cv_opt;
  std::vector<double> levels;
  double slack = 0.0;
  auto *conv = app.add_subcommand("converge", "Refinement study over mesh widths");
  conv->add_option("-c,--config", cv_opt.config, "Config file")->required();
  conv->add_option("-o,--out-dir", cv_opt.out_dir, "Output directory")->capture_default_str();
  conv->add_option("--levels", levels, "Mesh widths, strictly decreasing")->delimiter(',');
  auto *slack_opt = conv->add_option("--slack", slack, "Allowed growth factor between levels");

  DiagnoseOptions dg_opt;
  std::string dg_out;
  auto *diag = app.add_subcommand("diagnose", "Diagnostics of one snapshot file");
  diag->add_option("-c,--config", dg_opt.config, "Config file")->required();
  diag->add_option("-s,--snapshot", dg_opt.snapshot, "Snapshot CSV")->required();
  diag->add_option("-t,--time", dg_opt.time, "Time of the snapshot")->capture_default_str();
  diag->add_option("-o,--output", dg_out, "Write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    (void)app.exit(e);
    return exit_config;
  }

  const EnvLookup env = process_env();
  return run_command(
      [&]() -> int {
        if (*run) {
          if (!run_times.empty()) {
            run_opt.snapshot_times = run_times;
          }
          return cmd_run(run_opt, env, std::cout);
        }
        if (*riemann) {
          if (!profile.empty()) {
            rp_opt.profile = profile;
          }
          return cmd_riemann(rp_opt, std::cout);
        }
        if (*conv) {
          if (!levels.empty()) {
            cv_opt.levels = levels;
          }
          if (slack_opt->count() > 0) {
            cv_opt.slack = slack;
          }
          return cmd_converge(cv_opt, env, std::cout);
        }
        if (!dg_out.empty()) {
          dg_opt.output = dg_out;
        }
        return cmd_diagnose(dg_opt, env, std::cout);
      },
      std::cerr);
}
