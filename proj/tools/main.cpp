#include <CLI11.hpp>
#include <iostream>

#include "vortexpatch/commands.hpp"
#include "vortexpatch/config.hpp"
#include "vortexpatch/errors.hpp"
#include "vortexpatch/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{"vortex-patch energy maximizer, Euler evolution and stability lab"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  int threads = 1;
  app.add_option("--config", config_path, "run configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--override", overrides, "config override, section.key=value (repeatable)");
  app.add_option("--threads", threads, "worker threads for sweeps");

  auto* solve = app.add_subcommand("solve", "compute an energy-maximizing vortex patch");
  auto* evolve = app.add_subcommand("evolve", "evolve a vorticity field under 2D Euler");
  auto* stability = app.add_subcommand("stability", "perturb-and-evolve stability experiments");
  auto* oracle = app.add_subcommand("oracle", "run the analytic cross-validation checks");

  CLI11_PARSE(app, argc, argv);

  try {
    vpl::Config cfg;
    if (!config_path.empty()) cfg = vpl::Config::from_file(config_path);
    for (const auto& ov : overrides) cfg.apply_override(ov);

    if (solve->parsed()) return vpl::cmd_solve(cfg, out_dir);
    if (evolve->parsed()) return vpl::cmd_evolve(cfg, out_dir);
    if (stability->parsed()) return vpl::cmd_stability(cfg, out_dir, threads);
    if (oracle->parsed()) return vpl::cmd_oracle(cfg, out_dir);
  } catch (const vpl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return vpl::kExitConfigError;
  } catch (const vpl::DumpError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return vpl::kExitConfigError;
  } catch (const vpl::ConvergenceFailure& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return vpl::kExitConvergenceFailure;
  } catch (const vpl::BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << "\n";
    return vpl::kExitBlowUp;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return vpl::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
