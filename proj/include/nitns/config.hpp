#pragma once

#include <string>
#include <vector>

#include "nitns/initial.hpp"
#include "nitns/solvers.hpp"

namespace nitns {

struct ExperimentConfig {
  int dim = 2;
  int n = 32;
  SolverConfig solver;
  InitialCondition ic;
  std::string output_dir = "out";
  bool snapshots = true;

  // Driver-specific lists (compare and restart-study).
  std::vector<std::string> compare_formulations;
  std::vector<double> compare_deltas;
  std::vector<double> study_g;
  std::vector<std::string> study_ics;
};

/// Parses `key = value` lines (`#` starts a comment). Overrides are applied
/// after the text, each of the form `key=value`. Errors name the key and
/// the line ("--set" for overrides).
ExperimentConfig parse_config(const std::string& text,
                              const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {});

/// Canonical `key = value` text of a configuration (round-trips through
/// parse_config).
std::string format_config(const ExperimentConfig& config);

}  // namespace nitns
