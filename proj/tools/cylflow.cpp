#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "cylflow/cylflow.hpp"

int main(int argc, char** argv) {
  using namespace cylflow;
  CLI::App app{"Pseudo-spectral Navier-Stokes on the cylinder with energy-bound verification"};
  app.require_subcommand(1);
  std::string config, out, windows, run_dir;
  bool quiet = false;
  app.add_flag("--quiet", quiet, "Suppress progress output");

  auto* constants = app.add_subcommand("constants", "Compute kernel norms and framework constants");
  constants->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  constants->add_option("--out", out, "Output directory");

  auto* run = app.add_subcommand("run", "Integrate a scenario and write ledgers");
  run->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (default: output.dir)");

  auto* verify = app.add_subcommand("verify", "Check every bound against a run directory");
  verify->add_option("run_dir", run_dir, "Run directory")->required();
  verify->add_option("--out", out, "Directory for report.json (default: the run directory)");
  verify->add_option("--windows", windows, "Windows a:b,a:b for the local checks");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep given by sweep.parameter/sweep.values");
  sweep->add_option("--config", config, "Config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "Output directory (default: output.dir)");

  for (auto* sub : {constants, run, verify, sweep}) sub->add_flag("--quiet", quiet, "Suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    if (*verify) {
      std::optional<std::vector<Window>> w;
      if (!windows.empty()) w = parse_windows(windows);
      return cmd_verify(run_dir, out.empty() ? run_dir : out, w, quiet);
    }
    const AppConfig cfg = load_config(config);
    const std::string dir = out.empty() ? cfg.output_dir : out;
    if (*constants) return cmd_constants(cfg, dir, quiet);
    if (*run) return cmd_run(cfg, dir, quiet);
    return cmd_sweep(cfg, dir, quiet);
  } catch (const ConfigError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const CirculationError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const QuadratureError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumericalAbort;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalAbort;
  }
}
