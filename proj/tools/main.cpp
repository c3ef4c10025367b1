// magnls: batch front door for the magnetic NLS simulator.
//
// Subcommands: solve, wkb, compare, instability, convergence, audit.
// Exit codes: 0 ok, 2 config-invalid, 3 solver-divergence, 4 blowup, 5 leakage.

#include "magnls/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace magnls;

int main(int argc, char** argv) {
  CLI::App app{"magnetic nonlinear Schrodinger simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string output_dir;
  long seed = -1;
  int threads = 1;
  app.add_option("--config", config_path, "configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--output-dir", output_dir,
                 "output directory (overrides [output] dir)");
  app.add_option("--seed", seed, "seed echoed into metadata");
  app.add_option("--threads", threads, "concurrent sweep elements")
      ->check(CLI::PositiveNumber);

  auto* c_solve = app.add_subcommand("solve", "direct time integration");
  auto* c_wkb = app.add_subcommand("wkb", "semiclassical hyperbolic solve");
  auto* c_compare =
      app.add_subcommand("compare", "WKB reconstruction vs direct solve");
  auto* c_inst =
      app.add_subcommand("instability", "perturbed-data separation sweep");
  auto* c_conv = app.add_subcommand("convergence", "approximation ladders");
  auto* c_audit = app.add_subcommand("audit", "potential-regularity audit");

  std::vector<double> b_list;
  c_compare->add_option("--b-list", b_list, "field strengths")->delimiter(',');
  c_inst->add_option("--b-list", b_list, "field strengths")->delimiter(',');

  std::string mode = "piecewise";
  std::vector<int> m_list, n_list;
  int levels = 3;
  c_conv->add_option("--mode", mode, "piecewise | truncated | resolution");
  c_conv->add_option("--m-list", m_list, "truncation levels")->delimiter(',');
  c_conv->add_option("--n-list", n_list, "window counts")->delimiter(',');
  c_conv->add_option("--levels", levels, "resolution levels");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = parse_run_config(config_path);
    if (seed >= 0)
      cfg.seed = static_cast<unsigned long>(seed);
    std::filesystem::path outdir =
        output_dir.empty() ? std::filesystem::path(cfg.output_dir)
                           : std::filesystem::path(output_dir);

    if (c_solve->parsed())
      return cmd_solve(cfg, outdir);
    if (c_wkb->parsed())
      return cmd_wkb(cfg, outdir);
    if (c_compare->parsed())
      return cmd_compare(cfg, outdir, b_list, threads);
    if (c_inst->parsed())
      return cmd_instability(cfg, outdir, b_list, threads);
    if (c_conv->parsed()) {
      ConvergenceMode m;
      if (mode == "piecewise")
        m = ConvergenceMode::piecewise;
      else if (mode == "truncated")
        m = ConvergenceMode::truncated;
      else if (mode == "resolution")
        m = ConvergenceMode::resolution;
      else {
        std::cerr << "unknown convergence mode '" << mode << "'\n";
        return ExitCode::config_invalid;
      }
      const std::vector<int>& params =
          m == ConvergenceMode::truncated ? m_list : n_list;
      return cmd_convergence(cfg, outdir, m, params, levels, threads);
    }
    if (c_audit->parsed())
      return cmd_audit(cfg, outdir);
    return ExitCode::internal;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ExitCode::config_invalid;
  } catch (const ResolutionError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return ExitCode::config_invalid;
  } catch (const InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ExitCode::config_invalid;
  } catch (const SolverDivergence& e) {
    std::cerr << "solver divergence: " << e.what() << '\n';
    return ExitCode::solver_divergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCode::internal;
  }
}
