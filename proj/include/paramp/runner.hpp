#pragma once

#include "paramp/config.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace paramp {

inline constexpr const char* kVersion = "0.1.0";

struct RunSummary {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
  std::size_t rows = 0;
  /// Sweep points that raised a numerical error; they appear in the CSV with
  /// ok = 0.
  std::size_t failed_rows = 0;
  double wall_time_s = 0.0;
  std::vector<std::string> messages;
};

/// Executes the scenario, writes its CSV/JSON outputs and a manifest into
/// scenario.output_dir (created if missing). Numerical failures outside
/// sweeps propagate as NumericalError.
RunSummary run_scenario(const Scenario& scenario);

RunSummary run_scenario(const std::filesystem::path& config_path);

}  // namespace paramp
