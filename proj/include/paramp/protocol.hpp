#pragma once

// Two-step conversion of two-mode squeezing: a free detuning rotation of the
// spin phase followed by a partial Rabi (beam-splitter) rotation between the
// modes. Both steps are applied as exact orthogonal congruences.

#include "paramp/model.hpp"
#include "paramp/quadrature.hpp"

#include <vector>

namespace paramp {

enum class ProtocolTarget { kSingleMode, kMaximalTwoMode };

/// Axis written as cosθ(cosφ X_a − sinφ Y_a) − sinθ(cosψ X_b − sinψ Y_b)
/// with θ ∈ [0, π/2].
struct AxisAngles {
  double theta = 0.0;
  double phi = 0.0;
  double psi = 0.0;
};

AxisAngles decompose_axis(const Vec4& axis);

struct ProtocolSchedule {
  double delta_psi = 0.0;    // rad, [0, 2π)
  double delta_theta = 0.0;  // rad, [0, π)
  double detuning = 0.0;     // rad/s
  double g_used = 0.0;       // rad/s
  double t1 = 0.0;           // s
  double t2 = 0.0;           // s
  ProtocolTarget target = ProtocolTarget::kSingleMode;
  /// The selected axis already has the target form; the schedule is the identity.
  bool already_converted = false;
  Vec4 axis = Vec4::Zero();
  AxisAngles angles;
};

/// K C Kᵀ with K rotating (X_b, Y_b) so that ψ → ψ + phi.
Covariance4 detuning_rotation(const Covariance4& c, double phi);

/// Rotation by `theta` of the (X_a, X_b) and (Y_a, Y_b) planes; θ → θ + theta.
Covariance4 beamsplitter_rotation(const Covariance4& c, double theta);

/// Plans the angles from the most squeezed axis. Of two squeezed axes whose
/// variances agree within 1%, the one with the larger X_a weight is used.
/// Throws std::invalid_argument on a non-finite spectrum.
ProtocolSchedule plan_conversion(const QuadratureSpectrum& spectrum, ProtocolTarget target);

/// As above, and fills in the step durations t1 = Δψ/Δ, t2 = Δθ/g.
ProtocolSchedule plan_conversion(const QuadratureSpectrum& spectrum, ProtocolTarget target,
                                 const SystemParams& p);

struct ProtocolSample {
  int stage = 1;
  double angle = 0.0;  // rotation applied so far within the stage
  double sd_q1 = 0.0;  // initially squeezed axes
  double sd_q2 = 0.0;
  double sd_mode_a = 0.0;  // single-mode axes that end up squeezed
  double sd_mode_b = 0.0;
  double va_min = 0.0;
  double vb_min = 0.0;
};

struct ProtocolResult {
  Covariance4 final_state;
  std::vector<ProtocolSample> path;
  double va_min = 0.0;
  double vb_min = 0.0;
};

/// Detuning rotation then beam-splitter rotation, sampled on `substeps`
/// uniform angle steps per stage.
ProtocolResult execute_schedule(const Covariance4& c, const ProtocolSchedule& schedule,
                                int substeps = 200);

}  // namespace paramp
