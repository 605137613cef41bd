#pragma once

#include <stdexcept>
#include <string>

namespace nitns {

/// Invalid configuration, mismatched grids or field ranks.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite state or runaway enstrophy. Carries the simulation time at
/// which the failure was detected (NaN when raised below the time loop).
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// The near-identity map lost invertibility (|det grad A| below the guard).
class InvertibilityError : public std::runtime_error {
 public:
  InvertibilityError(const std::string& what, double min_det)
      : std::runtime_error(what), min_det_(min_det) {}
  double min_det() const { return min_det_; }

 private:
  double min_det_;
};

/// An exponential weight would overflow double precision.
class OverflowGuardError : public std::runtime_error {
 public:
  OverflowGuardError(const std::string& what, double max_admissible)
      : std::runtime_error(what), max_admissible_(max_admissible) {}
  /// Largest parameter value (lambda, delta, ...) the guard would accept.
  double max_admissible() const { return max_admissible_; }

 private:
  double max_admissible_;
};

class SnapshotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nitns
