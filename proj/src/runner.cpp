#include "paramp/runner.hpp"

#include "paramp/csv.hpp"
#include "paramp/errors.hpp"
#include "paramp/noise.hpp"
#include "paramp/parallel.hpp"
#include "paramp/protocol.hpp"
#include "paramp/quadrature.hpp"
#include "paramp/resonance.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>

namespace paramp {

using nlohmann::json;

namespace {

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string flag(bool b) { return b ? "1" : "0"; }

std::string sanitize(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '"' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

double number_option(const json& o, const char* key, double fallback) {
  if (!o.contains(key)) return fallback;
  if (!o[key].is_number()) throw ConfigError(std::string("options.") + key, "expected a number");
  return o[key].get<double>();
}

std::size_t count_option(const json& o, const char* key, std::size_t fallback) {
  if (!o.contains(key)) return fallback;
  if (!o[key].is_number_integer() || o[key].get<long long>() < 1) {
    throw ConfigError(std::string("options.") + key, "expected a positive integer");
  }
  return o[key].get<std::size_t>();
}

std::string string_option(const json& o, const char* key, const std::string& fallback) {
  if (!o.contains(key)) return fallback;
  if (!o[key].is_string()) throw ConfigError(std::string("options.") + key, "expected a string");
  return o[key].get<std::string>();
}

json params_json(const SystemParams& p) {
  json j;
  for (const char* key : {"omega_c_hz", "omega_s_hz", "g_hz", "lambda_hz", "omega_drive_hz",
                          "gamma_c_hz", "gamma_l_hz", "kappa_hz", "temperature_k", "n_s"}) {
    j[key] = parameter_value(p, key);
  }
  return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

/// One evaluation cell of a (series × sweep value) grid.
struct Cell {
  const Series* series = nullptr;
  double value = std::nan("");
  SystemParams params;
};

std::vector<Cell> cells_of(const Scenario& s) {
  std::vector<Cell> cells;
  for (const Series& series : s.series) {
    if (s.sweep) {
      for (double v : s.sweep->values) cells.push_back({&series, v, series.at(s.sweep->variable, v)});
    } else {
      cells.push_back({&series, std::nan(""), series.at("", 0.0)});
    }
  }
  return cells;
}

std::size_t periods_of(const Scenario& s, const SystemParams& p) {
  return s.evolution_time ? std::max<std::size_t>(1, periods_for(p, *s.evolution_time)) : s.periods;
}

struct RowResult {
  std::vector<std::string> fields;
  bool ok = true;
};

/// Evaluates `fn` on every cell concurrently; numerical failures become rows
/// with ok = 0 and the message in the error column.
std::vector<RowResult> evaluate_cells(const Scenario& s, const std::vector<Cell>& cells,
                                      std::size_t value_columns,
                                      const std::function<std::vector<std::string>(const Cell&)>& fn) {
  return parallel_map<RowResult>(cells.size(), s.workers, [&](std::size_t i) {
    RowResult r;
    try {
      r.fields = fn(cells[i]);
    } catch (const NumericalError& e) {
      r.ok = false;
      r.fields.assign(value_columns, "nan");
      r.fields.push_back(sanitize(e.what()));
    } catch (const std::invalid_argument& e) {
      r.ok = false;
      r.fields.assign(value_columns, "nan");
      r.fields.push_back(sanitize(e.what()));
    }
    if (r.ok) r.fields.push_back("");
    return r;
  });
}

std::vector<std::string> lead_header(const Scenario& s) {
  std::vector<std::string> h{"series"};
  if (s.sweep) h.push_back(s.sweep->variable);
  return h;
}

std::vector<std::string> lead_fields(const Scenario& s, const Cell& c) {
  std::vector<std::string> f{c.series->label};
  if (s.sweep) f.push_back(fmt(c.value));
  return f;
}

void write_grid(const Scenario& s, RunSummary& summary, const std::filesystem::path& file,
                const std::vector<std::string>& value_header,
                const std::function<std::vector<std::string>(const Cell&)>& fn) {
  const auto cells = cells_of(s);
  const auto rows = evaluate_cells(s, cells, value_header.size(), fn);
  auto header = lead_header(s);
  header.insert(header.end(), value_header.begin(), value_header.end());
  header.push_back("ok");
  header.push_back("error");
  CsvWriter csv(file, header);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto fields = lead_fields(s, cells[i]);
    const auto& r = rows[i];
    fields.insert(fields.end(), r.fields.begin(), r.fields.end() - 1);
    fields.push_back(flag(r.ok));
    fields.push_back(r.fields.back());
    csv.row(fields);
    ++summary.rows;
    if (!r.ok) ++summary.failed_rows;
  }
  summary.files.push_back(file);
}

// ---------------------------------------------------------------- actions

void run_trajectory(const Scenario& s, RunSummary& summary) {
  const auto file = s.output_dir / (s.name + ".csv");
  CsvWriter csv(file, {"series", "time_s", "periods", "v1", "v2", "v3", "v4", "s_amp_db",
                       "s_sqz_db", "symplectic_min", "c_xa_xa", "c_xa_ya", "c_xa_xb", "c_xa_yb",
                       "c_ya_ya", "c_ya_xb", "c_ya_yb", "c_xb_xb", "c_xb_yb", "c_yb_yb"});
  for (const Series& series : s.series) {
    const SystemParams p = series.at("", 0.0);
    const std::size_t n = periods_of(s, p);
    const PeriodMap map = period_map(p, s.rel_tol);
    const Trajectory traj = build_trajectory(vacuum_covariance(), map, p, n, s.stride);
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
      const Sample& smp = traj.samples[k];
      const QuadratureSpectrum spec = eigen_quadratures(smp.covariance);
      const SystemMetrics m = system_metrics(smp.covariance);
      std::vector<std::string> row{series.label, fmt(smp.time), fmt(k * s.stride)};
      for (double v : spec.variances) row.push_back(fmt(v));
      row.push_back(fmt(m.s_amp));
      row.push_back(fmt(m.s_sqz));
      row.push_back(fmt(smp.covariance.symplectic_eigenvalues()[0]));
      for (int i = 0; i < 4; ++i) {
        for (int j = i; j < 4; ++j) row.push_back(fmt(smp.covariance(i, j)));
      }
      csv.row(row);
      ++summary.rows;
    }
  }
  summary.files.push_back(file);
}

void run_steady_state(const Scenario& s, RunSummary& summary) {
  const std::size_t max_periods = count_option(s.options, "max_periods", 2'000'000);
  const double tol_db = number_option(s.options, "tol_db", 1e-4);
  write_grid(s, summary, s.output_dir / (s.name + ".csv"),
             {"s_sqz_db", "v_min", "spectral_radius", "floquet", "converged", "periods"},
             [&](const Cell& c) {
               const PeriodMap map = period_map(c.params, s.rel_tol);
               const auto ss = steady_state_squeezing(map, vacuum_covariance(), max_periods, tol_db);
               return std::vector<std::string>{
                   fmt(ss.s_sqz), fmt(eigen_quadratures(ss.state).v_min()),
                   fmt(map.spectral_radius()), flag(ss.floquet_fixed_point), flag(ss.converged),
                   fmt(ss.periods)};
             });
}

void run_rate_sweep(const Scenario& s, RunSummary& summary) {
  write_grid(s, summary, s.output_dir / (s.name + ".csv"),
             {"rate_db_per_us", "amplifying", "s_amp_db", "s_sqz_db", "drive_gain_db", "periods"},
             [&](const Cell& c) {
               const std::size_t n = periods_of(s, c.params);
               const DrivenPoint d = simulate_rate(c.params, n, s.stride, s.rel_tol);
               const double gain = drive_gain_db(c.params, n, s.rel_tol);
               return std::vector<std::string>{fmt(d.rate.db_per_us), flag(d.rate.amplifying),
                                               fmt(d.final_metrics.s_amp), fmt(d.final_metrics.s_sqz),
                                               fmt(gain), fmt(n)};
             });
}

void run_bandwidth(const Scenario& s, RunSummary& summary) {
  CavitySweep sweep;
  sweep.start = angular(number_option(s.options, "cavity_start_hz", 0.0));
  sweep.stop = angular(number_option(s.options, "cavity_stop_hz", 0.0));
  sweep.step = angular(number_option(s.options, "cavity_step_hz", 0.0));
  if (!(sweep.step > 0) || !(sweep.stop > sweep.start)) {
    throw ConfigError("options", "cavity sweep needs start < stop and step > 0");
  }
  const auto points_file = s.output_dir / (s.name + "_points.csv");
  const auto summary_file = s.output_dir / (s.name + ".csv");
  CsvWriter points(points_file, {"series", "omega_c_hz", "rate_db_per_us", "ok"});
  CsvWriter table(summary_file,
                  {"series", "fwhm_hz", "peak_omega_c_hz", "peak_rate_db_per_us", "bracketed"});
  for (const Series& series : s.series) {
    const SystemParams p = series.at("", 0.0);
    const BandwidthResult r = bandwidth_fwhm(p, sweep, periods_of(s, p), s.stride, s.workers, s.rel_tol);
    for (const SweepPoint& pt : r.points) {
      points.row({series.label, fmt(ordinary(pt.omega_c)), fmt(pt.rate_db_per_us), flag(pt.ok)});
      ++summary.rows;
      if (!pt.ok) ++summary.failed_rows;
    }
    table.row({series.label, fmt(r.fwhm_hz), fmt(ordinary(r.peak_omega_c)), fmt(r.peak_rate),
               flag(r.bracketed)});
    if (!r.bracketed) summary.messages.push_back(series.label + ": half maximum not bracketed");
  }
  summary.files.push_back(summary_file);
  summary.files.push_back(points_file);
}

void run_optimize(const Scenario& s, RunSummary& summary) {
  OptimizeOptions o;
  const std::string objective = string_option(s.options, "objective", "max-amplification");
  if (objective == "max-amplification") {
    o.objective = DriveObjective::kMaxAmplification;
  } else if (objective == "min-variance") {
    o.objective = DriveObjective::kMinVariance;
  } else {
    throw ConfigError("options.objective", "must be max-amplification or min-variance");
  }
  o.evolution_time = number_option(s.options, "evolution_time_s", o.evolution_time);
  o.budget = count_option(s.options, "budget", o.budget);
  o.workers = s.workers;
  o.rel_tol = number_option(s.options, "rel_tol", o.rel_tol);
  DriveBox box;
  const json b = s.options.value("box", json::object());
  box.omega_lo = angular(number_option(b, "omega_lo_hz", ordinary(box.omega_lo)));
  box.omega_hi = angular(number_option(b, "omega_hi_hz", ordinary(box.omega_hi)));
  box.omega_s_lo = angular(number_option(b, "omega_s_lo_hz", ordinary(box.omega_s_lo)));
  box.omega_s_hi = angular(number_option(b, "omega_s_hi_hz", ordinary(box.omega_s_hi)));
  box.lambda_lo = angular(number_option(b, "lambda_lo_hz", ordinary(box.lambda_lo)));
  box.lambda_hi = angular(number_option(b, "lambda_hi_hz", ordinary(box.lambda_hi)));

  const auto file = s.output_dir / (s.name + ".csv");
  CsvWriter csv(file, {"series", "objective", "objective_db", "omega_drive_hz", "omega_s_hz",
                       "lambda_hz", "grid_evaluations", "refine_evaluations", "converged",
                       "budget_exhausted"});
  for (const Series& series : s.series) {
    const OptimizeResult r = optimize_drive(series.at("", 0.0), box, o);
    csv.row({series.label, objective, fmt(r.objective_db), fmt(ordinary(r.best.omega_drive)),
             fmt(ordinary(r.best.omega_s)), fmt(ordinary(r.best.lambda_drive)),
             fmt(r.grid_evaluations), fmt(r.refine_evaluations), flag(r.converged),
             flag(r.budget_exhausted)});
    ++summary.rows;
    if (r.budget_exhausted) summary.messages.push_back(series.label + ": refinement budget exhausted");
  }
  summary.files.push_back(file);
}

double paramp_rate_for(const Scenario& s, const SystemParams& p) {
  const json& o = s.options;
  if (o.contains("k")) return number_option(o, "k", 0.0);
  if (o.contains("xi")) return number_option(o, "xi", 0.0) * std::sqrt(p.gamma() * p.kappa);
  if (o.contains("rate_db_per_us")) {
    return paramp_rate_from_db_rate(number_option(o, "rate_db_per_us", 0.0) * 1e6);
  }
  SystemParams undamped = p;
  undamped.gamma_c = undamped.gamma_l = undamped.kappa = 0.0;
  const DrivenPoint d = simulate_rate(undamped, periods_of(s, p), s.stride, s.rel_tol);
  return paramp_rate_from_db_rate(std::max(0.0, d.rate.db_per_us) * 1e6);
}

void run_noise_report(const Scenario& s, RunSummary& summary) {
  const auto cells = cells_of(s);
  json reports = json::array();
  const auto file = s.output_dir / (s.name + ".csv");
  auto header = lead_header(s);
  for (const char* h : {"k", "xi", "eta", "n_t", "n_s", "gain_ss", "n_add", "t_amp_k", "stable",
                        "margin"}) {
    header.push_back(h);
  }
  CsvWriter csv(file, header);
  const double spectrum_max = number_option(s.options, "spectrum_max_hz", 0.0);
  const std::size_t spectrum_points = count_option(s.options, "spectrum_points", 201);
  std::unique_ptr<CsvWriter> spectrum;
  if (spectrum_max > 0) {
    auto sh = lead_header(s);
    sh.push_back("nu_hz");
    sh.push_back("s_nu");
    sh.push_back("ok");
    spectrum = std::make_unique<CsvWriter>(s.output_dir / (s.name + "_spectrum.csv"), sh);
  }
  for (const Cell& c : cells) {
    const double k = paramp_rate_for(s, c.params);
    const NoiseReport r = noise_report(c.params, k);
    auto row = lead_fields(s, c);
    for (double v : {r.k, r.xi, r.eta, r.n_t, r.n_s, r.gain_ss, r.n_add, r.t_amp}) row.push_back(fmt(v));
    row.push_back(flag(r.stable));
    row.push_back(fmt(r.margin));
    csv.row(row);
    ++summary.rows;
    json j{{"series", c.series->label}, {"params", params_json(c.params)}, {"k", r.k},
           {"xi", r.xi}, {"eta", r.eta}, {"n_t", r.n_t}, {"n_s", r.n_s}, {"stable", r.stable},
           {"margin", r.margin}};
    j["gain_ss"] = std::isfinite(r.gain_ss) ? json(r.gain_ss) : json(nullptr);
    j["n_add"] = std::isfinite(r.n_add) ? json(r.n_add) : json(nullptr);
    j["t_amp_k"] = std::isfinite(r.t_amp) ? json(r.t_amp) : json(nullptr);
    if (s.sweep) j[s.sweep->variable] = c.value;
    reports.push_back(j);
    if (spectrum) {
      for (std::size_t i = 0; i < spectrum_points; ++i) {
        const double nu_hz = spectrum_points > 1
                                 ? -spectrum_max + 2.0 * spectrum_max * i / (spectrum_points - 1)
                                 : 0.0;
        auto srow = lead_fields(s, c);
        srow.push_back(fmt(nu_hz));
        try {
          srow.push_back(fmt(output_noise_spectrum(angular(nu_hz), c.params, k)));
          srow.push_back("1");
        } catch (const std::exception&) {
          srow.push_back("nan");
          srow.push_back("0");
        }
        spectrum->row(srow);
      }
    }
  }
  const auto json_file = s.output_dir / (s.name + ".json");
  write_json(json_file, json{{"reports", reports}});
  summary.files.push_back(file);
  summary.files.push_back(json_file);
  if (spectrum) summary.files.push_back(s.output_dir / (s.name + "_spectrum.csv"));
}

void run_protocol(const Scenario& s, RunSummary& summary) {
  const std::size_t max_periods = count_option(s.options, "max_periods", 2'000'000);
  const int substeps = static_cast<int>(count_option(s.options, "substeps", 200));
  const std::string target_name = string_option(s.options, "target", "single-mode");
  ProtocolTarget target;
  if (target_name == "single-mode") {
    target = ProtocolTarget::kSingleMode;
  } else if (target_name == "maximal-two-mode") {
    target = ProtocolTarget::kMaximalTwoMode;
  } else {
    throw ConfigError("options.target", "must be single-mode or maximal-two-mode");
  }
  const auto path_file = s.output_dir / (s.name + "_path.csv");
  CsvWriter csv(path_file, {"series", "stage", "angle_rad", "time_s", "sd_q1", "sd_q2",
                            "sd_mode_a", "sd_mode_b", "sd_vacuum", "va_min", "vb_min"});
  json schedules = json::array();
  for (const Series& series : s.series) {
    const SystemParams p = series.at("", 0.0);
    const PeriodMap map = period_map(p, s.rel_tol);
    const auto ss = steady_state_squeezing(map, vacuum_covariance(), max_periods);
    const QuadratureSpectrum spec = eigen_quadratures(ss.state);
    const ProtocolSchedule sch = plan_conversion(spec, target, p);
    const ProtocolResult res = execute_schedule(ss.state, sch, substeps);
    for (const ProtocolSample& smp : res.path) {
      double t = 0.0;
      if (smp.stage == 1) {
        t = sch.delta_psi > 0 ? sch.t1 * smp.angle / sch.delta_psi : 0.0;
      } else {
        t = sch.t1 + (sch.delta_theta > 0 ? sch.t2 * smp.angle / sch.delta_theta : 0.0);
      }
      csv.row({series.label, std::to_string(smp.stage), fmt(smp.angle), fmt(t), fmt(smp.sd_q1),
               fmt(smp.sd_q2), fmt(smp.sd_mode_a), fmt(smp.sd_mode_b), fmt(0.5), fmt(smp.va_min),
               fmt(smp.vb_min)});
      ++summary.rows;
    }
    schedules.push_back({{"series", series.label},
                         {"target", target_name},
                         {"input_s_sqz_db", ss.s_sqz},
                         {"input_v_min", spec.v_min()},
                         {"steady_state_converged", ss.converged},
                         {"theta", sch.angles.theta},
                         {"phi", sch.angles.phi},
                         {"psi", sch.angles.psi},
                         {"axis", {sch.axis(0), sch.axis(1), sch.axis(2), sch.axis(3)}},
                         {"delta_psi_rad", sch.delta_psi},
                         {"delta_psi_over_pi", sch.delta_psi / kPi},
                         {"delta_theta_rad", sch.delta_theta},
                         {"delta_theta_over_pi", sch.delta_theta / kPi},
                         {"detuning_hz", ordinary(sch.detuning)},
                         {"g_hz", ordinary(sch.g_used)},
                         {"t1_s", sch.t1},
                         {"t2_s", sch.t2},
                         {"already_converted", sch.already_converted},
                         {"final_va_min", res.va_min},
                         {"final_vb_min", res.vb_min}});
  }
  const auto json_file = s.output_dir / (s.name + "_schedule.json");
  write_json(json_file, json{{"schedules", schedules}});
  summary.files.push_back(path_file);
  summary.files.push_back(json_file);
}

void run_resonance_table(const Scenario& s, RunSummary& summary) {
  const int n_max = static_cast<int>(count_option(s.options, "n_max", 4));
  const double t_ref = number_option(s.options, "reference_time_s", 1e-6);
  const auto file = s.output_dir / (s.name + ".csv");
  CsvWriter csv(file, {"series", "n", "branch", "frequency_hz", "abs_f_minus_sigma",
                       "abs_f_minus_delta", "abs_f_plus_delta", "abs_f_plus_sigma"});
  for (const Series& series : s.series) {
    const SystemParams p = series.at("", 0.0);
    const ResonanceSpec spec = resonance_frequencies(p.omega_c, p.omega_s, n_max);
    for (const Harmonic& h : spec.harmonics) {
      SystemParams q = p;
      q.omega_drive = h.frequency;
      const auto f = resonance_strength(q, t_ref, EnvelopeConfig::for_argument(q.lambda_drive, h.frequency));
      csv.row({series.label, std::to_string(h.n), branch_name(h.branch), fmt(ordinary(h.frequency)),
               fmt(std::abs(f[0])), fmt(std::abs(f[1])), fmt(std::abs(f[2])), fmt(std::abs(f[3]))});
      ++summary.rows;
    }
  }
  summary.files.push_back(file);
}

}  // namespace

RunSummary run_scenario(const Scenario& s) {
  const auto start = std::chrono::steady_clock::now();
  std::filesystem::create_directories(s.output_dir);
  RunSummary summary;
  switch (s.action) {
    case Action::kTrajectory: run_trajectory(s, summary); break;
    case Action::kSteadyState: run_steady_state(s, summary); break;
    case Action::kRateVsAmplitude:
    case Action::kRateVsTemperature: run_rate_sweep(s, summary); break;
    case Action::kBandwidth: run_bandwidth(s, summary); break;
    case Action::kOptimize: run_optimize(s, summary); break;
    case Action::kNoiseReport: run_noise_report(s, summary); break;
    case Action::kProtocol: run_protocol(s, summary); break;
    case Action::kResonanceTable: run_resonance_table(s, summary); break;
  }
  summary.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json series = json::array();
  for (const Series& ser : s.series) {
    series.push_back({{"label", ser.label},
                      {"params", params_json(ser.params)},
                      {"defaulted", ser.defaulted},
                      {"drive_at_sum_frequency", ser.drive_at_sum}});
  }
  json files = json::array();
  for (const auto& f : summary.files) files.push_back(f.filename().string());
  json manifest{{"name", s.name},
                {"action", action_name(s.action)},
                {"version", kVersion},
                {"series", series},
                {"periods", s.periods},
                {"stride", s.stride},
                {"tolerances", {{"rel_tol", s.rel_tol}, {"abs_tol", 1e-14}, {"floquet_margin", 1e-9}}},
                {"workers", s.workers},
                {"assumptions", s.assumptions},
                {"options", s.options},
                {"outputs", files},
                {"rows", summary.rows},
                {"failed_rows", summary.failed_rows},
                {"messages", summary.messages},
                {"wall_time_s", summary.wall_time_s},
                {"document", s.document}};
  if (s.evolution_time) manifest["evolution_time_s"] = *s.evolution_time;
  if (s.sweep) manifest["sweep"] = {{"variable", s.sweep->variable}, {"values", s.sweep->values}};
  summary.manifest = s.output_dir / (s.name + "_manifest.json");
  write_json(summary.manifest, manifest);
  return summary;
}

RunSummary run_scenario(const std::filesystem::path& config_path) {
  return run_scenario(load_scenario(config_path));
}

}  // namespace paramp
