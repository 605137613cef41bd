#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nitns/errors.hpp"
#include "nitns/experiment.hpp"

using namespace nitns;

int main(int argc, char** argv) {
  CLI::App app{"Navier-Stokes formulations and Eulerian-Lagrangian restarts"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key = value configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", overrides, "override a key (key=value), repeatable");
  };

  auto* run_cmd = app.add_subcommand("run", "advance one trajectory and write diagnostics");
  add_config(run_cmd);
  auto* compare_cmd = app.add_subcommand("compare", "velocity differences between formulations");
  add_config(compare_cmd);
  auto* study_cmd = app.add_subcommand("restart-study", "inter-restart intervals versus g");
  add_config(study_cmd);
  auto* verify_cmd = app.add_subcommand("verify", "run property suites");
  std::vector<std::string> suites;
  verify_cmd->add_option("suite", suites, "algebra | spectral | energy | cauchy | consistency | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    configure_threads();
    if (verify_cmd->parsed()) return cmd_verify(suites, std::cout);
    const ExperimentConfig config = load_config(config_path, overrides);
    if (run_cmd->parsed()) return cmd_run(config, std::cout, std::cerr);
    if (compare_cmd->parsed()) return cmd_compare(config, std::cout);
    if (study_cmd->parsed()) return cmd_restart_study(config, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const BlowUpError& e) {
    std::cerr << "blow-up at t=" << e.time() << ": " << e.what() << '\n';
    return kExitBlowUp;
  } catch (const InvertibilityError& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return kExitBlowUp;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
