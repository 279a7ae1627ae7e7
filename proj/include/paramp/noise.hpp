#pragma once

// Steady-state model of the amplifier, with the frequency modulation replaced
// by a non-degenerate parametric amplifier of rate k (modes on resonance):
// gain, output noise spectrum, added noise and noise temperature.

#include "paramp/model.hpp"

namespace paramp {

/// k = Ṡ/(5 log10 e) for an undamped amplification rate Ṡ in dB/s.
double paramp_rate_from_db_rate(double s_dot_db_per_s);

/// G_ss = [(γ_c − γ_l)κ + k²]/[(γ_c + γ_l)κ − k²]. Throws UnstableError
/// when k² ≥ γκ.
double steady_state_gain(double gamma_c, double gamma_l, double kappa, double k);

/// S(ν) in the form printed with the input-output derivation. ν = 0 gives
/// γ_c[κ²γ_l(2n_T+1) + k²κ(2n_s+1)]/(k² − γκ)², so S(0)/G_ss² = n_add + 1/2.
/// Throws UnstableError above threshold and std::domain_error where the
/// denominator is not positive.
double output_noise_spectrum(double nu, const SystemParams& p, double k);

/// n_add = η[(γ_l/γ)(2n_T+1) + ξ²(2n_s+1)]/[η + ξ² − γ_l/γ]² − 1/2 with the
/// cavity-bath n_T taken from the temperature and ω_c.
double added_noise_photons(const SystemParams& p, double k);

/// Same formula with the occupations given directly.
double added_noise_photons(double gamma_c, double gamma_l, double kappa, double k, double n_t,
                           double n_s);

/// T_amp = (ħω_c/k_B)/ln(1/n_add + 1); zero at n_add = 0.
double noise_temperature(double n_add, double omega_c);

struct Stability {
  bool stable = true;
  double xi = 0.0;  // k/√(γκ)
};

Stability stability_margin(double k, double gamma, double kappa);

struct NoiseReport {
  double k = 0.0;
  double xi = 0.0;
  double eta = 0.0;
  double n_t = 0.0;
  double n_s = 0.0;
  double gain_ss = 0.0;  // NaN when unstable
  double n_add = 0.0;    // NaN when unstable
  double t_amp = 0.0;    // NaN when unstable
  bool stable = true;
  double margin = 1.0;  // 1 − ξ
};

NoiseReport noise_report(const SystemParams& p, double k);

/// Drift of the fictitious paramp in the frame rotating with both modes:
/// X_a and X_b coupled by +k/2, Y_a and Y_b by −k/2.
Mat4 paramp_drift(double k, double gamma, double kappa);

/// Covariance dynamics of the fictitious paramp with the bath occupations
/// of `p` (γ = γ_c + γ_l). `period` only sets the length of a period map.
LinearDynamics paramp_dynamics(const SystemParams& p, double k, double period);

}  // namespace paramp
