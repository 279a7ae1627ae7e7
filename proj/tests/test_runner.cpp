#include "paramp/runner.hpp"

#include "paramp/errors.hpp"
#include "paramp/power.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace paramp;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("paramp_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(fields);
  }
  return rows;
}

std::string config_error_path(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ConfigError& e) {
    return e.key_path();
  }
  return "<no error>";
}

json small_trajectory(const fs::path& out) {
  return json{{"name", "traj"},
              {"action", "trajectory"},
              {"params", {{"g_hz", 3.5e6}, {"gamma_hz", 2e5}, {"kappa_hz", 2e5}}},
              {"periods", 200},
              {"stride", 50},
              {"output", out.string()}};
}

}  // namespace

TEST_CASE("configuration errors name the offending key") {
  json base = small_trajectory("x");
  CHECK(config_error_path(base) == "<no error>");

  json d = base;
  d["params"]["bogus"] = 1.0;
  CHECK(config_error_path(d) == "params.bogus");

  d = base;
  d["params"]["g_hz"] = "fast";
  CHECK(config_error_path(d) == "params.g_hz");

  d = base;
  d["params"]["kappa_hz"] = -1.0;
  CHECK(config_error_path(d) == "params.kappa_hz");

  d = base;
  d["series"] = json::array({{{"label", "a"}, {"params", {{"polarization", 1.5}}}}});
  CHECK(config_error_path(d) == "series[0].params.polarization");

  d = base;
  d["frobnicate"] = true;
  CHECK(config_error_path(d) == "frobnicate");

  d = base;
  d["action"] = "dance";
  CHECK(config_error_path(d) == "action");

  d = base;
  d.erase("action");
  CHECK(config_error_path(d) == "action");

  d = base;
  d["rel_tol"] = 0.5;
  CHECK(config_error_path(d) == "rel_tol");

  d = base;
  d["sweep"] = {{"variable", "lambda_hz"}, {"values", {1e8, 2e8}}};
  CHECK(config_error_path(d) == "sweep");
}

TEST_CASE("sweeps") {
  json d = small_trajectory("x");
  d["action"] = "rate-vs-amplitude";
  d["sweep"] = {{"variable", "lambda_hz"}, {"values", {1e8}}};
  CHECK(config_error_path(d) == "sweep");

  d["sweep"] = {{"variable", "lambda_hz"}, {"start", 1e8}, {"stop", 1e9}, {"points", 1}};
  CHECK(config_error_path(d) != "<no error>");

  d["sweep"] = {{"variable", "temperature_k"}, {"values", {1.0, 2.0}}};
  CHECK(config_error_path(d) == "sweep.variable");

  d["sweep"] = {{"variable", "lambda_hz"}, {"start", 1e6}, {"stop", 1e9}, {"points", 4},
                {"scale", "log"}};
  const Scenario s = parse_scenario(d);
  REQUIRE(s.sweep);
  REQUIRE(s.sweep->values.size() == 4);
  CHECK(s.sweep->values[1] == doctest::Approx(1e7));
  CHECK(s.sweep->values[3] == doctest::Approx(1e9));
}

TEST_CASE("presets") {
  const auto names = preset_names();
  for (const char* n : {"fig2", "fig3a", "fig3b", "fig4", "fig5", "noise300k", "bandwidth",
                        "room-epr"}) {
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  }
  for (const auto& n : names) {
    CHECK_NOTHROW(parse_scenario(json{{"preset", n}}));
  }
  CHECK_THROWS_AS(preset_document("fig99"), ConfigError);
  CHECK(config_error_path(json{{"preset", "fig99"}}) == "preset");

  const Scenario fig3b = parse_scenario(json{{"preset", "fig3b"}});
  CHECK(fig3b.action == Action::kSteadyState);
  CHECK(fig3b.series.size() == 4);
  const Scenario patched = parse_scenario(json{{"preset", "fig2"}, {"periods", 100}});
  CHECK(patched.periods == 100);
}

TEST_CASE("defaulted parameters are recorded") {
  const Scenario s = parse_scenario(json{{"name", "d"}, {"action", "trajectory"},
                                         {"params", {{"g_hz", 3.5e6}}}});
  const Series& series = s.series.front();
  CHECK(series.defaulted.count("g_hz") == 0);
  CHECK(series.defaulted.count("omega_c_hz") == 1);
  CHECK(series.defaulted.at("omega_c_hz") == doctest::Approx(2.5e9));
  CHECK(series.drive_at_sum);
  CHECK(series.params.omega_drive == doctest::Approx(series.params.sigma()));
}

TEST_CASE("trajectory run is deterministic and writes a manifest") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  const RunSummary ra = run_scenario(parse_scenario(small_trajectory(a)));
  json db = small_trajectory(b);
  db["workers"] = 3;
  const RunSummary rb = run_scenario(parse_scenario(db));
  REQUIRE(ra.files.size() == rb.files.size());
  CHECK(slurp(a / "traj.csv") == slurp(b / "traj.csv"));
  CHECK(ra.rows == 5);

  const auto rows = read_csv(a / "traj.csv");
  REQUIRE(rows.size() == 6);
  CHECK(rows[0][0] == "series");
  CHECK(rows[0][1] == "time_s");

  const json manifest = json::parse(slurp(ra.manifest));
  CHECK(manifest.contains("series"));
  CHECK(manifest.dump().find("omega_c_hz") != std::string::npos);
  CHECK(manifest.contains("rows"));
}

TEST_CASE("temperature sweep without damping gives a constant rate") {
  const fs::path out = scratch("tsweep");
  json d = {{"name", "tsweep"},
            {"action", "rate-vs-temperature"},
            {"params", {{"g_hz", 3.5e6}, {"gamma_hz", 0}, {"kappa_hz", 0}, {"lambda_hz", 5e8}}},
            {"sweep", {{"variable", "temperature_k"}, {"values", {0.001, 1.0, 300.0}}}},
            {"periods", 600},
            {"stride", 20},
            {"output", out.string()}};
  const RunSummary r = run_scenario(parse_scenario(d));
  CHECK(r.failed_rows == 0);
  const auto rows = read_csv(out / "tsweep.csv");
  REQUIRE(rows.size() == 4);
  const auto col = std::find(rows[0].begin(), rows[0].end(), "rate_db_per_us") - rows[0].begin();
  REQUIRE(col < static_cast<long>(rows[0].size()));
  const double first = std::stod(rows[1][col]);
  CHECK(first > 0);
  for (int i = 2; i <= 3; ++i) CHECK(std::stod(rows[i][col]) == first);
}

TEST_CASE("noise report run") {
  const fs::path out = scratch("noise");
  json d = {{"preset", "noise300k"}, {"output", out.string()}};
  const RunSummary r = run_scenario(parse_scenario(d));
  const json report = json::parse(slurp(out / "noise300k.json"));
  CHECK(report.dump().find("n_add") != std::string::npos);
  CHECK(r.rows >= 1);
}

TEST_CASE("power conversion") {
  PowerSpec mt{0.75, ConversionUnits::kMilliTeslaPerRootWatt, 28e6, 9.0};
  CHECK(ordinary(modulation_amplitude_from_power(mt)) == doctest::Approx(63e6).epsilon(1e-12));

  PowerSpec hz{252e6, ConversionUnits::kHertzPerRootWatt, 28e6, 16.0};
  CHECK(ordinary(modulation_amplitude_from_power(hz)) == doctest::Approx(1.008e9).epsilon(1e-12));
  CHECK(required_power(angular(500e6), hz) == doctest::Approx(3.94).epsilon(1e-3));

  PowerSpec cavity{30e3 / 10.0, ConversionUnits::kMilliTeslaPerRootWatt, 28e6, 0.0};
  CHECK(required_power(angular(1e9), cavity) == doctest::Approx(140e-6).epsilon(0.03));

  hz.power_w = 0.0;
  CHECK(modulation_amplitude_from_power(hz) == 0.0);
  CHECK(required_power(0.0, hz) == 0.0);

  for (double w : {1e-6, 0.3, 9.0, 250.0}) {
    mt.power_w = w;
    CHECK(required_power(modulation_amplitude_from_power(mt), mt) ==
          doctest::Approx(w).epsilon(1e-12));
  }
  PowerSpec broken{0.0, ConversionUnits::kHertzPerRootWatt, 28e6, 1.0};
  CHECK_THROWS_AS(required_power(1.0, broken), std::invalid_argument);
}
