#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace paramp {

/// Malformed or schema-violating configuration.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key_path, const std::string& what)
      : std::runtime_error(key_path.empty() ? what : key_path + ": " + what),
        key_path_(key_path) {}
  const std::string& key_path() const { return key_path_; }

 private:
  std::string key_path_;
};

/// Base for failures of the numerics (as opposed to bad input).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The adaptive integrator could not resolve the interval at the requested
/// tolerance.
class IntegrationError : public NumericalError {
 public:
  IntegrationError(const std::string& what, double time)
      : NumericalError(what + " at t = " + std::to_string(time) + " s"), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Covariance norm left the representable range while iterating the period map.
class OverflowError : public NumericalError {
 public:
  OverflowError(const std::string& what, std::size_t period)
      : NumericalError(what + " at period " + std::to_string(period)), period_(period) {}
  std::size_t period() const { return period_; }

 private:
  std::size_t period_;
};

/// Amplifier above threshold: no steady state exists.
class UnstableError : public NumericalError {
 public:
  UnstableError(const std::string& what, double measure)
      : NumericalError(what), measure_(measure) {}
  /// Spectral radius of the period map, or ξ for the analytic model.
  double measure() const { return measure_; }

 private:
  double measure_;
};

}  // namespace paramp
