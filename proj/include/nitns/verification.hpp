#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nitns {

struct PropertyResult {
  std::string suite;
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// algebra, spectral, energy, cauchy, consistency.
const std::vector<std::string>& verification_suites();

/// Runs one named property suite. Throws ConfigError for an unknown name.
std::vector<PropertyResult> run_suite(const std::string& suite);

/// One line per property: `<suite> <name> PASS|FAIL value=<v> tol=<t>`.
void print_results(const std::vector<PropertyResult>& results, std::ostream& out);

}  // namespace nitns
