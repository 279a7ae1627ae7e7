#include "paramp/config.hpp"
#include "paramp/errors.hpp"
#include "paramp/model.hpp"
#include "paramp/power.hpp"
#include "paramp/runner.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <optional>

namespace {

enum Exit { kOk = 0, kConfig = 1, kNumerical = 2, kPartial = 3 };

int report(const paramp::RunSummary& s) {
  for (const auto& f : s.files) std::cout << "wrote " << f.string() << '\n';
  std::cout << "wrote " << s.manifest.string() << '\n';
  for (const auto& m : s.messages) std::cerr << "note: " << m << '\n';
  std::cout << s.rows << " rows, " << s.failed_rows << " failed, " << s.wall_time_s << " s\n";
  if (s.failed_rows > 0) return s.failed_rows == s.rows ? kNumerical : kPartial;
  return kOk;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const paramp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const paramp::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Covariance simulator for a frequency-modulated spin ensemble coupled to a cavity"};
  app.require_subcommand(1);
  app.set_version_flag("--version", paramp::kVersion);

  auto* run = app.add_subcommand("run", "Run a scenario described by a JSON file");
  std::string config_path;
  std::optional<std::size_t> run_workers;
  run->add_option("config", config_path, "Scenario file")->required();
  run->add_option("--workers", run_workers, "Concurrent sweep points")->check(CLI::PositiveNumber);

  auto* preset = app.add_subcommand("preset", "Run a bundled scenario");
  std::string preset_name;
  std::string out_dir;
  std::optional<std::size_t> workers;
  std::optional<double> tol;
  bool list = false;
  preset->add_option("name", preset_name, "Preset name");
  preset->add_flag("--list", list, "List presets and exit");
  preset->add_option("--out", out_dir, "Output directory");
  preset->add_option("--workers", workers, "Concurrent sweep points")->check(CLI::PositiveNumber);
  preset->add_option("--tol", tol, "Relative integration tolerance");

  auto* power = app.add_subcommand("power", "Modulation amplitude from microwave power, or back");
  double cp = 0.0;
  std::string units = "mt";
  std::optional<double> watts, lambda_hz;
  double gyro = 28e6;
  power->add_option("--cp", cp, "Conversion factor (mT/sqrt(W) or Hz/sqrt(W))")->required();
  power->add_option("--units", units, "mt or hz")->check(CLI::IsMember({"mt", "hz"}));
  auto* w_opt = power->add_option("--watts", watts, "Power in W");
  auto* l_opt = power->add_option("--lambda-hz", lambda_hz, "Target amplitude Lambda/2pi in Hz");
  power->add_option("--gyromagnetic", gyro, "Hz per mT");
  w_opt->excludes(l_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  if (*run) {
    return guarded([&] {
      paramp::Scenario s = paramp::load_scenario(config_path);
      if (run_workers) s.workers = *run_workers;
      return report(paramp::run_scenario(s));
    });
  }
  if (*preset) {
    if (list) {
      for (const auto& n : paramp::preset_names()) std::cout << n << '\n';
      return kOk;
    }
    if (preset_name.empty()) {
      std::cerr << "preset: a name is required (see --list)\n";
      return kConfig;
    }
    return guarded([&] {
      nlohmann::json doc{{"preset", preset_name}};
      if (!out_dir.empty()) doc["output"] = out_dir;
      if (workers) doc["workers"] = *workers;
      if (tol) doc["rel_tol"] = *tol;
      return report(paramp::run_scenario(paramp::parse_scenario(doc)));
    });
  }
  return guarded([&] {
    if (!watts && !lambda_hz) throw paramp::ConfigError("power", "give --watts or --lambda-hz");
    paramp::PowerSpec spec;
    spec.conversion_factor = cp;
    spec.units = units == "hz" ? paramp::ConversionUnits::kHertzPerRootWatt
                               : paramp::ConversionUnits::kMilliTeslaPerRootWatt;
    spec.gyromagnetic_hz_per_mt = gyro;
    std::cout.precision(6);
    if (watts) {
      spec.power_w = *watts;
      const double lambda = paramp::modulation_amplitude_from_power(spec);
      std::cout << "Lambda/2pi = " << paramp::ordinary(lambda) / 1e6 << " MHz ("
                << spec.hertz_per_root_watt() / 1e6 << " MHz/sqrt(W) at " << *watts << " W)\n";
    } else {
      const double p = paramp::required_power(paramp::angular(*lambda_hz), spec);
      std::cout << "P = " << p << " W for Lambda/2pi = " << *lambda_hz / 1e6 << " MHz\n";
    }
    return static_cast<int>(kOk);
  });
}
