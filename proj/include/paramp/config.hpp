#pragma once

// Scenario documents: JSON configuration with an optional "preset" base,
// parameter series, an optional one-dimensional sweep and action options.

#include "paramp/model.hpp"

#include <json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace paramp {

enum class Action {
  kTrajectory,
  kSteadyState,
  kRateVsAmplitude,
  kRateVsTemperature,
  kBandwidth,
  kOptimize,
  kNoiseReport,
  kProtocol,
  kResonanceTable,
};

const char* action_name(Action a);
Action parse_action(const std::string& name, const std::string& key_path);

/// Parameter keys accepted under "params". Frequencies are ordinary (Hz);
/// `gamma_hz` sets a matched cavity, `polarization` sets n_s.
const std::vector<std::string>& parameter_keys();

/// Sets one parameter. Throws ConfigError for unknown keys or bad values.
void apply_parameter(SystemParams& p, const std::string& key, double value,
                     const std::string& key_path);

/// Reads a parameter back in configuration units.
double parameter_value(const SystemParams& p, const std::string& key);

struct Series {
  std::string label;
  SystemParams params;
  /// Parameters taken from defaults rather than the document, with values.
  std::map<std::string, double> defaulted;
  /// ω follows ω_c + ω_s when omega_drive_hz is not given.
  bool drive_at_sum = true;

  /// Parameters at one sweep value (or unchanged when `variable` is empty).
  SystemParams at(const std::string& variable, double value) const;
};

struct Sweep {
  std::string variable;
  std::vector<double> values;
};

struct Scenario {
  std::string name;
  Action action = Action::kTrajectory;
  std::vector<Series> series;
  std::optional<Sweep> sweep;
  std::size_t periods = 10200;
  std::size_t stride = 100;
  std::optional<double> evolution_time;  // s; overrides `periods`
  double rel_tol = 1e-10;
  std::size_t workers = 1;
  std::filesystem::path output_dir = ".";
  std::vector<std::string> assumptions;
  nlohmann::json options = nlohmann::json::object();
  nlohmann::json document;  // the merged document
};

/// Validates and resolves a scenario document. A "preset" key is replaced by
/// the named preset, with the document's own keys merged over it.
Scenario parse_scenario(const nlohmann::json& doc);

/// Reads a JSON file. Relative "output" paths resolve against the current
/// directory.
Scenario load_scenario(const std::filesystem::path& path);

std::vector<std::string> preset_names();
/// Throws ConfigError for unknown names.
nlohmann::json preset_document(const std::string& name);

}  // namespace paramp
