#pragma once

// First-order perturbative picture of the modulated spin frequency: the
// envelope F(x, y, t) built from the Jacobi-Anger expansion, the predicted
// resonance frequencies ω = (ω_s ± ω_c)/n, and the Holstein-Primakoff ladder
// coefficient C(s).

#include "paramp/model.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace paramp {

enum class Branch { kSum, kDifference };

const char* branch_name(Branch b);

struct Harmonic {
  int n = 1;
  double frequency = 0.0;  // rad/s
  Branch branch = Branch::kSum;
};

struct ResonanceSpec {
  double sigma = 0.0;  // ω_s + ω_c
  double delta = 0.0;  // ω_s − ω_c
  /// Descending in frequency. A frequency reachable from both branches is
  /// listed once, under the sum branch.
  std::vector<Harmonic> harmonics;
};

ResonanceSpec resonance_frequencies(double omega_c, double omega_s, int n_max);

struct EnvelopeConfig {
  int truncation = 40;
  double y_over_omega = 0.0;

  /// Smallest admissible truncation, ceil(|y/ω|) + 20.
  static int minimum_truncation(double y_over_omega);
  /// Default truncation ceil(|y/ω|) + 40.
  static EnvelopeConfig for_argument(double y, double omega);
};

/// J_n(x) for n = 0..n_max by Miller's backward recurrence, normalized with
/// J_0 + 2 Σ J_2k = 1.
std::vector<double> bessel_j_sequence(int n_max, double x);

/// Single-order convenience wrapper (negative n allowed).
double bessel_j(int n, double x);

/// F(x, y, t) = Σ_n iⁿ J_n(−y/ω) [e^{i(x+nω)t} − 1]/(x + nω), with the exact
/// limit iⁿ⁺¹ J_n t where |x + nω| < ω·1e-12.
std::complex<double> envelope_F(double x, double y, double t, double omega,
                                const EnvelopeConfig& config);

/// √((N/2 + s + 1)(N/2 − s)). `s` must be one of −N/2, −N/2 + 1, ..., N/2.
double coupling_coefficient(int n_spins, double s);

/// F(−Σ,−Λ,t), F(−Δ,−Λ,t), F(Δ,Λ,t), F(Σ,Λ,t) at drive frequency ω.
std::array<std::complex<double>, 4> resonance_strength(const SystemParams& p, double t,
                                                       const EnvelopeConfig& config);

}  // namespace paramp
