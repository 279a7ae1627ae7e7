#pragma once

// Microwave power needed for a given spin-frequency modulation amplitude.

namespace paramp {

enum class ConversionUnits { kMilliTeslaPerRootWatt, kHertzPerRootWatt };

struct PowerSpec {
  double conversion_factor = 0.0;  // mT/√W or Hz/√W
  ConversionUnits units = ConversionUnits::kMilliTeslaPerRootWatt;
  double gyromagnetic_hz_per_mt = 28e6;
  double power_w = 0.0;

  /// Modulation amplitude per √W, in Hz/√W.
  double hertz_per_root_watt() const;
};

/// Λ (rad/s) produced by spec.power_w.
double modulation_amplitude_from_power(const PowerSpec& spec);

/// Power (W) that produces Λ = target_lambda (rad/s).
double required_power(double target_lambda, const PowerSpec& spec);

}  // namespace paramp
