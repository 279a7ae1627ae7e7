#pragma once

// Eigen-quadrature analysis: dB metrics, amplification-rate fits, bandwidth
// sweeps, steady-state squeezing and drive optimization.

#include "paramp/model.hpp"
#include "paramp/propagator.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace paramp {

/// Eigen-decomposition of a covariance, ascending by variance. Axes are unit
/// vectors over (X_a, Y_a, X_b, Y_b) with their first nonzero component
/// positive.
struct QuadratureSpectrum {
  std::array<double, 4> variances{};
  std::array<Vec4, 4> axes{};
  std::array<double, 4> db{};

  double v_min() const { return variances[0]; }
  double v_max() const { return variances[3]; }
};

QuadratureSpectrum eigen_quadratures(const Covariance4& c);

/// S(V) = 10 log10(2 sqrt(V)); 0 dB at the vacuum variance.
double squeezing_db(double variance);

struct SystemMetrics {
  double s_sqz = 0.0;  // min(0, S(V_min)), dB
  double s_amp = 0.0;  // S(V_max), dB
  double v_min = 0.0;
  double v_max = 0.0;
  double va_min = 0.0, va_max = 0.0;
  double vb_min = 0.0, vb_max = 0.0;
};

SystemMetrics system_metrics(const Covariance4& c);

struct RateFit {
  double db_per_us = 0.0;
  /// False when S(V_max) is not monotone over the fit window.
  bool amplifying = false;
  std::size_t samples_used = 0;
};

/// Least-squares slope of S(V_max) against time after dropping the first 5%
/// of samples. Needs at least 10 samples in the window.
RateFit amplification_rate(const Trajectory& traj);

/// Vacuum start, `n_periods` iterations of the period map.
Covariance4 evolve_from_vacuum(const SystemParams& p, std::size_t n_periods,
                               double rel_tol = kDefaultRelTol);

/// Periods of the drive closest to `seconds`.
std::size_t periods_for(const SystemParams& p, double seconds);

struct DrivenPoint {
  RateFit rate;
  SystemMetrics final_metrics;
};

/// Vacuum start, trajectory of n_periods sampled every `stride` periods,
/// fitted rate plus metrics of the final state.
DrivenPoint simulate_rate(const SystemParams& p, std::size_t n_periods, std::size_t stride,
                          double rel_tol = kDefaultRelTol);

/// S_amp with the drive on minus S_amp of the same system with Λ = 0, both
/// from vacuum after n_periods. Removes thermal filling of the modes, which
/// is not amplification.
double drive_gain_db(const SystemParams& p, std::size_t n_periods,
                     double rel_tol = kDefaultRelTol);

struct SqueezingSteadyState {
  Covariance4 state;
  double s_sqz = 0.0;
  /// True when the period map is stable and the Floquet fixed point was used.
  bool floquet_fixed_point = false;
  /// Fixed point, or the iterated S_sqz settled within the tolerance.
  bool converged = false;
  std::size_t periods = 0;
};

/// Steady-state squeezing. Below threshold this is the Floquet fixed point.
/// Above threshold the amplified quadratures grow without bound while the
/// squeezed ones settle, so the map is iterated from `c0` until S_sqz changes
/// by less than `tol_db` between checks, or `max_periods` elapse, or the
/// covariance condition number passes 1e10.
SqueezingSteadyState steady_state_squeezing(const PeriodMap& map, const Covariance4& c0,
                                            std::size_t max_periods, double tol_db = 1e-4);

struct SweepPoint {
  double omega_c = 0.0;  // rad/s
  double rate_db_per_us = 0.0;
  bool ok = true;
};

struct BandwidthResult {
  double fwhm_hz = 0.0;
  double peak_omega_c = 0.0;
  double peak_rate = 0.0;
  /// False when the half maximum is not crossed on both sides of the peak.
  bool bracketed = false;
  std::vector<SweepPoint> points;
};

struct CavitySweep {
  double start = 0.0;  // rad/s
  double stop = 0.0;
  double step = 0.0;
};

/// FWHM (Hz) of the amplification rate as ω_c is scanned at fixed ω, ω_s.
BandwidthResult bandwidth_fwhm(const SystemParams& p, const CavitySweep& sweep,
                               std::size_t n_periods, std::size_t stride,
                               std::size_t workers = 1, double rel_tol = kDefaultRelTol);

/// FWHM from already-evaluated points (sorted by omega_c).
BandwidthResult fwhm_from_points(std::vector<SweepPoint> points);

enum class DriveObjective { kMaxAmplification, kMinVariance };

/// Search box in rad/s. lo == hi pins a coordinate.
struct DriveBox {
  double omega_lo = angular(1e9), omega_hi = angular(9e9);
  double omega_s_lo = angular(2e9), omega_s_hi = angular(4e9);
  double lambda_lo = angular(0.1e9), lambda_hi = angular(1e9);
};

struct OptimizeOptions {
  DriveObjective objective = DriveObjective::kMaxAmplification;
  double evolution_time = 0.2e-6;  // s
  /// Evaluations for the simplex stage; the 9×9×5 grid is not counted.
  std::size_t budget = 200;
  std::size_t workers = 1;
  double rel_tol = 1e-9;
};

struct OptimizeResult {
  SystemParams best;
  double objective_db = 0.0;  // S_amp, or S(V_min)
  std::size_t grid_evaluations = 0;
  std::size_t refine_evaluations = 0;
  bool converged = false;
  bool budget_exhausted = false;
};

OptimizeResult optimize_drive(const SystemParams& base, const DriveBox& box,
                              const OptimizeOptions& options);

}  // namespace paramp
