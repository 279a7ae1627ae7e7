#include "paramp/power.hpp"

#include "paramp/model.hpp"

#include <cmath>
#include <stdexcept>

namespace paramp {

double PowerSpec::hertz_per_root_watt() const {
  if (!(conversion_factor >= 0) || !(gyromagnetic_hz_per_mt >= 0)) {
    throw std::invalid_argument("PowerSpec: conversion factors must be >= 0");
  }
  return units == ConversionUnits::kHertzPerRootWatt ? conversion_factor
                                                     : conversion_factor * gyromagnetic_hz_per_mt;
}

double modulation_amplitude_from_power(const PowerSpec& spec) {
  if (!(spec.power_w >= 0)) throw std::invalid_argument("power must be >= 0");
  return angular(spec.hertz_per_root_watt() * std::sqrt(spec.power_w));
}

double required_power(double target_lambda, const PowerSpec& spec) {
  const double c = spec.hertz_per_root_watt();
  if (!(c > 0)) throw std::invalid_argument("required_power: conversion factor must be > 0");
  if (!(target_lambda >= 0)) throw std::invalid_argument("required_power: amplitude must be >= 0");
  const double r = ordinary(target_lambda) / c;
  return r * r;
}

}  // namespace paramp
