#include "paramp/config.hpp"

#include "paramp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace paramp {

namespace detail {
const std::map<std::string, std::string>& embedded_presets();
}

using nlohmann::json;

namespace {

const std::vector<std::string> kCanonical = {
    "omega_c_hz", "omega_s_hz", "g_hz",        "lambda_hz",     "omega_drive_hz",
    "gamma_c_hz", "gamma_l_hz", "kappa_hz",    "temperature_k", "n_s"};

const std::set<std::string> kTopLevel = {
    "name",  "description", "action",           "preset",  "params",  "series",
    "sweep", "periods",     "stride",           "rel_tol", "workers", "output",
    "assumptions", "options", "evolution_time_s"};

double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

std::size_t count_at(const json& j, const std::string& path, std::size_t minimum) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    throw ConfigError(path, "expected an integer");
  }
  const auto v = j.get<long long>();
  if (v < static_cast<long long>(minimum)) {
    throw ConfigError(path, "must be >= " + std::to_string(minimum));
  }
  return static_cast<std::size_t>(v);
}

/// Keys in canonical form that a params object sets.
std::set<std::string> apply_params(SystemParams& p, const json& params, const std::string& path,
                                   bool& drive_given) {
  std::set<std::string> given;
  if (params.is_null()) return given;
  if (!params.is_object()) throw ConfigError(path, "expected an object");
  // gamma_hz first so explicit gamma_c_hz / gamma_l_hz refine it.
  if (params.contains("gamma_hz")) {
    apply_parameter(p, "gamma_hz", number_at(params["gamma_hz"], path + ".gamma_hz"),
                    path + ".gamma_hz");
    given.insert("gamma_c_hz");
    given.insert("gamma_l_hz");
  }
  for (const auto& [key, value] : params.items()) {
    if (key == "gamma_hz") continue;
    const std::string kp = path + "." + key;
    apply_parameter(p, key, number_at(value, kp), kp);
    given.insert(key == "polarization" ? "n_s" : key);
    if (key == "omega_drive_hz") drive_given = true;
  }
  return given;
}

std::vector<double> sweep_values(const json& s, const std::string& path) {
  std::vector<double> values;
  if (s.contains("values")) {
    const json& v = s["values"];
    if (!v.is_array()) throw ConfigError(path + ".values", "expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      values.push_back(number_at(v[i], path + ".values[" + std::to_string(i) + "]"));
    }
  } else {
    for (const char* k : {"start", "stop", "points"}) {
      if (!s.contains(k)) throw ConfigError(path + "." + k, "required");
    }
    const double start = number_at(s["start"], path + ".start");
    const double stop = number_at(s["stop"], path + ".stop");
    const std::size_t n = count_at(s["points"], path + ".points", 0);
    const std::string scale = s.value("scale", "linear");
    if (scale != "linear" && scale != "log") {
      throw ConfigError(path + ".scale", "must be \"linear\" or \"log\"");
    }
    if (scale == "log" && !(start > 0 && stop > 0)) {
      throw ConfigError(path, "log sweeps need positive start and stop");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double f = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
      values.push_back(scale == "log" ? start * std::pow(stop / start, f)
                                      : start + f * (stop - start));
    }
  }
  if (values.size() < 2) throw ConfigError(path, "a sweep needs at least 2 points");
  return values;
}

}  // namespace

const char* action_name(Action a) {
  switch (a) {
    case Action::kTrajectory: return "trajectory";
    case Action::kSteadyState: return "steady-state";
    case Action::kRateVsAmplitude: return "rate-vs-amplitude";
    case Action::kRateVsTemperature: return "rate-vs-temperature";
    case Action::kBandwidth: return "bandwidth";
    case Action::kOptimize: return "optimize";
    case Action::kNoiseReport: return "noise-report";
    case Action::kProtocol: return "protocol";
    case Action::kResonanceTable: return "resonance-table";
  }
  return "?";
}

Action parse_action(const std::string& name, const std::string& key_path) {
  for (Action a : {Action::kTrajectory, Action::kSteadyState, Action::kRateVsAmplitude,
                   Action::kRateVsTemperature, Action::kBandwidth, Action::kOptimize,
                   Action::kNoiseReport, Action::kProtocol, Action::kResonanceTable}) {
    if (name == action_name(a)) return a;
  }
  throw ConfigError(key_path, "unknown action \"" + name + "\"");
}

const std::vector<std::string>& parameter_keys() {
  static const std::vector<std::string> keys = [] {
    auto k = kCanonical;
    k.push_back("gamma_hz");
    k.push_back("polarization");
    return k;
  }();
  return keys;
}

void apply_parameter(SystemParams& p, const std::string& key, double value,
                     const std::string& key_path) {
  if (!std::isfinite(value)) throw ConfigError(key_path, "must be finite");
  const auto positive = [&] {
    if (!(value > 0)) throw ConfigError(key_path, "must be > 0");
  };
  const auto nonnegative = [&] {
    if (!(value >= 0)) throw ConfigError(key_path, "must be >= 0");
  };
  if (key == "omega_c_hz") { positive(); p.omega_c = angular(value); }
  else if (key == "omega_s_hz") { positive(); p.omega_s = angular(value); }
  else if (key == "g_hz") { nonnegative(); p.g = angular(value); }
  else if (key == "lambda_hz") { nonnegative(); p.lambda_drive = angular(value); }
  else if (key == "omega_drive_hz") { positive(); p.omega_drive = angular(value); }
  else if (key == "gamma_c_hz") { nonnegative(); p.gamma_c = angular(value); }
  else if (key == "gamma_l_hz") { nonnegative(); p.gamma_l = angular(value); }
  else if (key == "gamma_hz") { nonnegative(); p.with_matched_cavity(angular(value)); }
  else if (key == "kappa_hz") { nonnegative(); p.kappa = angular(value); }
  else if (key == "temperature_k") { nonnegative(); p.temperature = value; }
  else if (key == "n_s") { nonnegative(); p.n_s = value; }
  else if (key == "polarization") {
    if (!(value > 0 && value <= 1)) throw ConfigError(key_path, "must lie in (0, 1]");
    p.n_s = spin_occupation_from_polarization(value);
  } else {
    throw ConfigError(key_path, "unknown parameter \"" + key + "\"");
  }
}

double parameter_value(const SystemParams& p, const std::string& key) {
  if (key == "omega_c_hz") return ordinary(p.omega_c);
  if (key == "omega_s_hz") return ordinary(p.omega_s);
  if (key == "g_hz") return ordinary(p.g);
  if (key == "lambda_hz") return ordinary(p.lambda_drive);
  if (key == "omega_drive_hz") return ordinary(p.omega_drive);
  if (key == "gamma_c_hz") return ordinary(p.gamma_c);
  if (key == "gamma_l_hz") return ordinary(p.gamma_l);
  if (key == "gamma_hz") return ordinary(p.gamma());
  if (key == "kappa_hz") return ordinary(p.kappa);
  if (key == "temperature_k") return p.temperature;
  if (key == "n_s") return p.n_s;
  if (key == "polarization") return 1.0 / (2.0 * p.n_s + 1.0);
  throw ConfigError("", "unknown parameter \"" + key + "\"");
}

SystemParams Series::at(const std::string& variable, double value) const {
  SystemParams q = params;
  if (!variable.empty()) apply_parameter(q, variable, value, "sweep.variable");
  if (drive_at_sum && variable != "omega_drive_hz") q.omega_drive = q.sigma();
  return q;
}

Scenario parse_scenario(const json& input) {
  if (!input.is_object()) throw ConfigError("", "scenario must be a JSON object");
  json doc = input;
  if (input.contains("preset")) {
    if (!input["preset"].is_string()) throw ConfigError("preset", "expected a string");
    doc = preset_document(input["preset"].get<std::string>());
    json overlay = input;
    overlay.erase("preset");
    doc.merge_patch(overlay);
  }
  for (const auto& [key, value] : doc.items()) {
    if (!kTopLevel.count(key)) throw ConfigError(key, "unknown key");
  }

  Scenario s;
  s.document = doc;
  if (!doc.contains("action")) throw ConfigError("action", "required");
  if (!doc["action"].is_string()) throw ConfigError("action", "expected a string");
  s.action = parse_action(doc["action"].get<std::string>(), "action");
  s.name = doc.value("name", std::string(action_name(s.action)));
  if (s.name.empty() || s.name.find_first_of("/\\") != std::string::npos) {
    throw ConfigError("name", "must be a non-empty file-name-safe identifier");
  }
  if (doc.contains("periods")) s.periods = count_at(doc["periods"], "periods", 1);
  if (doc.contains("stride")) s.stride = count_at(doc["stride"], "stride", 1);
  if (doc.contains("evolution_time_s")) {
    const double t = number_at(doc["evolution_time_s"], "evolution_time_s");
    if (!(t > 0)) throw ConfigError("evolution_time_s", "must be > 0");
    s.evolution_time = t;
  }
  if (doc.contains("rel_tol")) {
    s.rel_tol = number_at(doc["rel_tol"], "rel_tol");
    if (!(s.rel_tol >= 1e-14 && s.rel_tol <= 1e-3)) {
      throw ConfigError("rel_tol", "must lie in [1e-14, 1e-3]");
    }
  }
  if (doc.contains("workers")) s.workers = count_at(doc["workers"], "workers", 1);
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ConfigError("output", "expected a string");
    s.output_dir = doc["output"].get<std::string>();
  }
  if (doc.contains("assumptions")) {
    const json& a = doc["assumptions"];
    if (!a.is_array()) throw ConfigError("assumptions", "expected an array of strings");
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i].is_string()) {
        throw ConfigError("assumptions[" + std::to_string(i) + "]", "expected a string");
      }
      s.assumptions.push_back(a[i].get<std::string>());
    }
  }
  if (doc.contains("options")) {
    if (!doc["options"].is_object()) throw ConfigError("options", "expected an object");
    s.options = doc["options"];
  }

  const json base_params = doc.value("params", json::object());
  const auto make_series = [&](const std::string& label, const json& overrides,
                               const std::string& path) {
    Series out;
    out.label = label;
    bool drive_given = false;
    std::set<std::string> given = apply_params(out.params, base_params, "params", drive_given);
    const auto more = apply_params(out.params, overrides, path, drive_given);
    given.insert(more.begin(), more.end());
    out.drive_at_sum = !drive_given;
    if (out.drive_at_sum) out.params.omega_drive = out.params.sigma();
    for (const auto& key : kCanonical) {
      if (!given.count(key)) out.defaulted[key] = parameter_value(out.params, key);
    }
    try {
      out.params.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path, e.what());
    }
    return out;
  };

  if (doc.contains("series")) {
    const json& list = doc["series"];
    if (!list.is_array() || list.empty()) throw ConfigError("series", "expected a non-empty array");
    std::set<std::string> labels;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = "series[" + std::to_string(i) + "]";
      const json& item = list[i];
      if (!item.is_object()) throw ConfigError(path, "expected an object");
      for (const auto& [key, value] : item.items()) {
        if (key != "label" && key != "params") throw ConfigError(path + "." + key, "unknown key");
      }
      if (!item.contains("label") || !item["label"].is_string()) {
        throw ConfigError(path + ".label", "required string");
      }
      const std::string label = item["label"].get<std::string>();
      if (!labels.insert(label).second) throw ConfigError(path + ".label", "duplicate label");
      s.series.push_back(make_series(label, item.value("params", json::object()), path + ".params"));
    }
  } else {
    s.series.push_back(make_series(s.name, json::object(), "params"));
  }

  if (doc.contains("sweep")) {
    const json& sw = doc["sweep"];
    if (!sw.is_object()) throw ConfigError("sweep", "expected an object");
    if (!sw.contains("variable") || !sw["variable"].is_string()) {
      throw ConfigError("sweep.variable", "required string");
    }
    Sweep sweep;
    sweep.variable = sw["variable"].get<std::string>();
    const auto& keys = parameter_keys();
    if (std::find(keys.begin(), keys.end(), sweep.variable) == keys.end()) {
      throw ConfigError("sweep.variable", "\"" + sweep.variable + "\" is not a parameter key");
    }
    sweep.values = sweep_values(sw, "sweep");
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
      SystemParams probe;
      apply_parameter(probe, sweep.variable, sweep.values[i],
                      "sweep.values[" + std::to_string(i) + "]");
    }
    s.sweep = std::move(sweep);
  }

  const auto need_sweep_of = [&](const char* variable) {
    if (s.sweep && s.sweep->variable != variable) {
      throw ConfigError("sweep.variable", std::string(action_name(s.action)) +
                                              " sweeps " + variable);
    }
  };
  switch (s.action) {
    case Action::kRateVsAmplitude: need_sweep_of("lambda_hz"); break;
    case Action::kRateVsTemperature: need_sweep_of("temperature_k"); break;
    case Action::kTrajectory:
    case Action::kProtocol:
    case Action::kOptimize:
    case Action::kBandwidth:
      if (s.sweep) throw ConfigError("sweep", std::string(action_name(s.action)) + " takes no sweep");
      break;
    default: break;
  }
  if (s.action == Action::kBandwidth) {
    for (const char* k : {"cavity_start_hz", "cavity_stop_hz", "cavity_step_hz"}) {
      if (!s.options.contains(k)) throw ConfigError(std::string("options.") + k, "required");
      number_at(s.options[k], std::string("options.") + k);
    }
  }
  if (s.action == Action::kNoiseReport) {
    int sources = 0;
    for (const char* k : {"k", "xi", "rate_db_per_us", "k_from_simulation"}) {
      sources += s.options.contains(k) ? 1 : 0;
    }
    if (sources != 1) {
      throw ConfigError("options", "noise-report needs exactly one of k, xi, rate_db_per_us, "
                                   "k_from_simulation");
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("", path.string() + ": " + e.what());
  }
  return parse_scenario(doc);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : detail::embedded_presets()) names.push_back(name);
  return names;
}

json preset_document(const std::string& name) {
  const auto& presets = detail::embedded_presets();
  const auto it = presets.find(name);
  if (it == presets.end()) throw ConfigError("preset", "unknown preset \"" + name + "\"");
  return json::parse(it->second);
}

}  // namespace paramp
