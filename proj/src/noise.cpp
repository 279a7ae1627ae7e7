#include "paramp/noise.hpp"

#include "paramp/errors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace paramp {

namespace {

void require_stable(double k, double gamma, double kappa, const char* who) {
  const Stability s = stability_margin(k, gamma, kappa);
  if (!s.stable) {
    throw UnstableError(std::string(who) + ": k >= sqrt(gamma kappa), no steady state", s.xi);
  }
}

}  // namespace

double paramp_rate_from_db_rate(double s_dot) {
  if (!(s_dot >= 0)) throw std::invalid_argument("paramp_rate_from_db_rate: rate must be >= 0");
  return s_dot / (5.0 * std::log10(std::exp(1.0)));
}

double steady_state_gain(double gamma_c, double gamma_l, double kappa, double k) {
  const double gamma = gamma_c + gamma_l;
  require_stable(k, gamma, kappa, "steady_state_gain");
  return ((gamma_c - gamma_l) * kappa + k * k) / (gamma * kappa - k * k);
}

double output_noise_spectrum(double nu, const SystemParams& p, double k) {
  const double gamma = p.gamma();
  const double kappa = p.kappa;
  require_stable(k, gamma, kappa, "output_noise_spectrum");
  const double n_t = cavity_occupation(p);
  const double num = (kappa * kappa + 4 * nu * nu) * p.gamma_l * (2 * n_t + 1) +
                     k * k * kappa * (2 * p.n_s + 1);
  const double bracket = (4 * nu * nu + k * k) - gamma * kappa;
  const double den = bracket * bracket / 2 - nu * nu * (gamma + kappa) * (gamma + kappa);
  if (!(den > 0)) {
    throw std::domain_error("output_noise_spectrum: denominator vanishes at nu = " +
                            std::to_string(nu) + " rad/s");
  }
  return (p.gamma_c / 2) * num / den;
}

double added_noise_photons(double gamma_c, double gamma_l, double kappa, double k, double n_t,
                           double n_s) {
  const double gamma = gamma_c + gamma_l;
  if (!(gamma > 0) || !(kappa > 0)) {
    throw std::invalid_argument("added_noise_photons: gamma and kappa must be > 0");
  }
  // ξ = 1 is the formula's own high-gain limit and is accepted.
  const double xi = k / std::sqrt(gamma * kappa);
  if (xi > 1.0) throw UnstableError("added_noise_photons: k > sqrt(gamma kappa)", xi);
  const double eta = gamma_c / gamma;
  const double loss = gamma_l / gamma;
  const double den = eta + xi * xi - loss;
  return eta * (loss * (2 * n_t + 1) + xi * xi * (2 * n_s + 1)) / (den * den) - 0.5;
}

double added_noise_photons(const SystemParams& p, double k) {
  return added_noise_photons(p.gamma_c, p.gamma_l, p.kappa, k, cavity_occupation(p), p.n_s);
}

double noise_temperature(double n_add, double omega_c) {
  if (n_add < 0) throw std::invalid_argument("noise_temperature: n_add must be >= 0");
  if (n_add == 0) return 0.0;
  return kHbar * omega_c / kBoltzmann / std::log1p(1.0 / n_add);
}

Stability stability_margin(double k, double gamma, double kappa) {
  if (!(gamma > 0) || !(kappa > 0)) {
    throw std::invalid_argument("stability_margin: gamma and kappa must be > 0");
  }
  Stability s;
  s.xi = k / std::sqrt(gamma * kappa);
  s.stable = s.xi < 1.0;
  return s;
}

NoiseReport noise_report(const SystemParams& p, double k) {
  NoiseReport r;
  r.k = k;
  const Stability s = stability_margin(k, p.gamma(), p.kappa);
  r.xi = s.xi;
  r.stable = s.stable;
  r.margin = 1.0 - s.xi;
  r.eta = p.gamma_c / p.gamma();
  r.n_t = cavity_occupation(p);
  r.n_s = p.n_s;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  r.gain_ss = s.stable ? steady_state_gain(p.gamma_c, p.gamma_l, p.kappa, k) : nan;
  r.n_add = s.xi <= 1.0 ? added_noise_photons(p, k) : nan;
  r.t_amp = (s.xi <= 1.0 && r.n_add >= 0) ? noise_temperature(r.n_add, p.omega_c) : nan;
  return r;
}

Mat4 paramp_drift(double k, double gamma, double kappa) {
  Mat4 a = Mat4::Zero();
  a(0, 0) = a(1, 1) = -gamma / 2;
  a(2, 2) = a(3, 3) = -kappa / 2;
  a(0, 2) = a(2, 0) = k / 2;
  a(1, 3) = a(3, 1) = -k / 2;
  return a;
}

LinearDynamics paramp_dynamics(const SystemParams& p, double k, double period) {
  const Mat4 a = paramp_drift(k, p.gamma(), p.kappa);
  LinearDynamics d;
  d.drift = [a](double) { return a; };
  d.diffusion = diffusion_matrix(p);
  d.period = period;
  return d;
}

}  // namespace paramp
