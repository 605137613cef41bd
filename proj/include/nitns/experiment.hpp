#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "nitns/config.hpp"
#include "nitns/driver.hpp"

namespace nitns {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFailure = 2;
inline constexpr int kExitBlowUp = 3;
inline constexpr int kExitConfigError = 4;

/// Grid, initial velocity and evolved state of a configuration.
SimState make_initial(const ExperimentConfig& config);

/// Relative L2 distance |a - b| / |ref| of two velocity fields.
double relative_l2(const SpectralField& a, const SpectralField& b, const SpectralField& ref);

/// Runs one trajectory. Writes timeseries.csv, extras.csv, config.used and
/// snapshots under config.output_dir and prints a summary. A blow-up keeps
/// the partial outputs, saves the last good state and returns kExitBlowUp.
int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

struct CompareRow {
  std::string formulation;
  double delta = 0.0;  ///< 0 for formulations without a filter
  double terminal = 0.0;
  double running_max = 0.0;
};

/// Runs compare.formulations (the first is the reference) at a shared fixed
/// step for every delta in compare.deltas and reports velocity differences.
std::vector<CompareRow> compare(const ExperimentConfig& config);
int cmd_compare(const ExperimentConfig& config, std::ostream& out);

/// Runs the named suites ("all" selects every suite).
int cmd_verify(const std::vector<std::string>& suites, std::ostream& out);

struct RestartStudyRow {
  std::string ic;
  double g = 0.0;
  int restarts = 0;
  double mean_interval = 0.0;  ///< NaN without restarts
  double min_interval = 0.0;
  double G = 0.0;
  double tau_scale = 0.0;  ///< g G^-7
};

/// Eulerian-Lagrangian runs over study.ics x study.g.
std::vector<RestartStudyRow> restart_study(const ExperimentConfig& config);
int cmd_restart_study(const ExperimentConfig& config, std::ostream& out);

/// Applies NITNS_THREADS to the OpenMP runtime when set.
void configure_threads();

}  // namespace nitns
