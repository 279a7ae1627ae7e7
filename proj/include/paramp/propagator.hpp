#pragma once

// Covariance propagation: adaptive integration of the matrix ODE, the
// one-drive-period affine map C -> Φ C Φᵀ + D, its iteration and its fixed
// point (the stroboscopic steady state).

#include "paramp/model.hpp"

#include <cstddef>
#include <vector>

namespace paramp {

inline constexpr double kDefaultRelTol = 1e-10;

/// One-period affine map. `dee` is the diffusion accumulated over one period
/// starting from C = 0.
struct PeriodMap {
  Mat4 phi = Mat4::Identity();
  Mat4 dee = Mat4::Zero();
  double period = 0.0;
  double tolerance_used = kDefaultRelTol;

  /// max |eig(Φ)|
  double spectral_radius() const;
  /// 1 − spectral radius; positive when a steady state exists.
  double stability_margin() const { return 1.0 - spectral_radius(); }
  Covariance4 apply(const Covariance4& c) const;
};

struct Sample {
  double time = 0.0;
  Covariance4 covariance;
};

struct Trajectory {
  std::vector<Sample> samples;
  SystemParams params;
};

/// Integrates dC/dt = A C + C Aᵀ + G over [t0, t1]. rel_tol ∈ [1e-14, 1e-3].
Covariance4 integrate_interval(const Covariance4& c0, double t0, double t1,
                               const LinearDynamics& dyn, double rel_tol = kDefaultRelTol);
Covariance4 integrate_interval(const Covariance4& c0, double t0, double t1,
                               const SystemParams& params, double rel_tol = kDefaultRelTol);

/// Builds (Φ, D) over [0, dyn.period] by integrating dΦ/dt = AΦ and
/// dD/dt = AD + DAᵀ + G together under one step controller.
PeriodMap period_map(const LinearDynamics& dyn, double rel_tol = kDefaultRelTol);
PeriodMap period_map(const SystemParams& params, double rel_tol = kDefaultRelTol);

/// n applications of the map, symmetrizing after each. Throws OverflowError
/// (with the period index) when entries stop being finite or exceed 1e150.
Covariance4 iterate_periods(const Covariance4& c0, const PeriodMap& map, std::size_t n);

/// Samples at t = j·stride·τ for j = 0..n_periods/stride.
Trajectory build_trajectory(const Covariance4& c0, const PeriodMap& map,
                            const SystemParams& params, std::size_t n_periods,
                            std::size_t stride);

/// Fixed point of C = ΦCΦᵀ + D via (I − Φ⊗Φ) vec C = vec D. Throws
/// UnstableError when the spectral radius is ≥ 1 − 1e-9.
Covariance4 floquet_steady_state(const PeriodMap& map);

}  // namespace paramp
