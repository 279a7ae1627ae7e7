#pragma once

// Embedded Dormand-Prince 5(4) integrator with a PI step-size controller
// (Hairer, Norsett & Wanner, Solving ODEs I, II.4). Works on any fixed-size
// Eigen matrix type as the state.

#include "paramp/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

namespace paramp::ode {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  std::size_t max_steps = 50'000'000;
  /// Zero lets the integrator pick the first step.
  double initial_step = 0.0;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

namespace detail {

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, const Options& o) {
  const auto sc = (o.abs_tol + o.rel_tol * y0.array().abs().max(y1.array().abs())).eval();
  const double sum = (err.array() / sc).square().sum();
  return std::sqrt(sum / static_cast<double>(err.size()));
}

template <class State, class Rhs>
double initial_step(Rhs& f, double t0, const State& y0, const State& f0, double span,
                    const Options& o) {
  const auto sc = (o.abs_tol + o.rel_tol * y0.array().abs()).eval();
  const double n = static_cast<double>(y0.size());
  const double dnf = std::sqrt((f0.array() / sc).square().sum() / n);
  const double dny = std::sqrt((y0.array() / sc).square().sum() / n);
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 * span : 0.01 * dny / dnf;
  h = std::min(h, span);
  const State y1 = y0 + h * f0;
  const State f1 = f(t0 + h, y1);
  const double der2 = std::sqrt(((f1 - f0).array() / sc).square().sum() / n) / h;
  const double der = std::max(std::abs(der2), dnf);
  const double h1 = der <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3)
                                 : std::pow(0.01 / der, 1.0 / 5.0);
  return std::min({100.0 * h, h1, span});
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1 (> t0) and returns y(t1). Throws
/// IntegrationError when the step size underflows or the step budget runs out.
template <class State, class Rhs>
State integrate(Rhs&& f, State y, double t0, double t1, const Options& o,
                Stats* stats = nullptr) {
  // Dormand-Prince tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                   a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  // PI controller constants.
  constexpr double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
  constexpr double fac_min_inv = 1.0 / 0.2, fac_max_inv = 1.0 / 10.0;

  Stats local;
  Stats& st = stats ? *stats : local;
  const double span = t1 - t0;
  if (!(span > 0)) throw IntegrationError("integrate: empty or reversed interval", t0);

  State k1 = f(t0, y);
  ++st.rhs_evaluations;
  double h = o.initial_step > 0 ? std::min(o.initial_step, span)
                                : detail::initial_step(f, t0, y, k1, span, o);
  double t = t0;
  double err_old = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;

  while (t < t1) {
    if (++steps > o.max_steps) throw IntegrationError("integrate: step budget exhausted", t);
    if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), span)) {
      throw IntegrationError("integrate: step size underflow", t);
    }
    const bool final_step = t + h >= t1;
    if (final_step) h = t1 - t;

    const State k2 = f(t + c2 * h, (y + h * (a21 * k1)).eval());
    const State k3 = f(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
    const State k4 = f(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
    const State k5 =
        f(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
    const State k6 =
        f(t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
    const State y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const State k7 = f(t + h, y_new);
    st.rhs_evaluations += 6;

    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = detail::error_norm(err, y, y_new, o);
    if (!std::isfinite(en)) throw IntegrationError("integrate: non-finite state", t);

    const double fac11 = std::pow(en, expo1);
    if (en <= 1.0) {
      double fac = fac11 / std::pow(err_old, beta);
      fac = std::clamp(fac / safe, fac_max_inv, fac_min_inv);
      err_old = std::max(en, 1e-4);
      t = final_step ? t1 : t + h;
      y = y_new;
      k1 = k7;
      ++st.accepted;
      double h_new = h / fac;
      if (last_rejected) h_new = std::min(h_new, h);
      last_rejected = false;
      h = h_new;
    } else {
      h /= std::min(fac_min_inv, fac11 / safe);
      last_rejected = true;
      ++st.rejected;
    }
  }
  return y;
}

}  // namespace paramp::ode
