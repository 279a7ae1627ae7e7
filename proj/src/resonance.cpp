#include "paramp/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace paramp {

const char* branch_name(Branch b) { return b == Branch::kSum ? "sum" : "difference"; }

ResonanceSpec resonance_frequencies(double omega_c, double omega_s, int n_max) {
  if (n_max < 1) throw std::invalid_argument("resonance_frequencies: n_max must be >= 1");
  ResonanceSpec spec;
  spec.sigma = omega_s + omega_c;
  spec.delta = omega_s - omega_c;
  const double abs_delta = std::abs(spec.delta);

  const auto seen = [&](double f) {
    return std::any_of(spec.harmonics.begin(), spec.harmonics.end(), [f](const Harmonic& h) {
      return std::abs(h.frequency - f) <= 1e-12 * std::max(std::abs(f), 1.0);
    });
  };
  for (int n = 1; n <= n_max; ++n) {
    const double f = spec.sigma / n;
    if (!seen(f)) spec.harmonics.push_back({n, f, Branch::kSum});
  }
  if (abs_delta > 0) {
    for (int n = 1; n <= n_max; ++n) {
      const double f = abs_delta / n;
      if (!seen(f)) spec.harmonics.push_back({n, f, Branch::kDifference});
    }
  }
  std::stable_sort(spec.harmonics.begin(), spec.harmonics.end(),
                   [](const Harmonic& a, const Harmonic& b) { return a.frequency > b.frequency; });
  return spec;
}

int EnvelopeConfig::minimum_truncation(double y_over_omega) {
  return static_cast<int>(std::ceil(std::abs(y_over_omega))) + 20;
}

EnvelopeConfig EnvelopeConfig::for_argument(double y, double omega) {
  EnvelopeConfig c;
  c.y_over_omega = y / omega;
  c.truncation = static_cast<int>(std::ceil(std::abs(c.y_over_omega))) + 40;
  return c;
}

std::vector<double> bessel_j_sequence(int n_max, double x) {
  if (n_max < 0) throw std::invalid_argument("bessel_j_sequence: n_max must be >= 0");
  std::vector<double> j(static_cast<std::size_t>(n_max) + 1, 0.0);
  if (x == 0.0) {
    j[0] = 1.0;
    return j;
  }
  const double ax = std::abs(x);
  const int top = std::max(n_max, static_cast<int>(ax));
  int start = top + 20 + static_cast<int>(std::sqrt(40.0 * (top + 1)));
  start += start % 2;

  constexpr double kBig = 1e250;
  double next = 0.0;  // J_{k+1}
  double cur = 1e-300;  // J_k
  double norm = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = 2.0 * k / ax * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (k - 1 <= n_max) j[static_cast<std::size_t>(k - 1)] = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
    if (std::abs(cur) > kBig) {
      cur /= kBig;
      next /= kBig;
      norm /= kBig;
      for (auto& v : j) v /= kBig;
    }
  }
  norm += cur;  // J_0
  for (auto& v : j) v /= norm;
  if (x < 0) {
    for (std::size_t n = 1; n < j.size(); n += 2) j[n] = -j[n];
  }
  return j;
}

double bessel_j(int n, double x) {
  const int an = std::abs(n);
  const double v = bessel_j_sequence(an, x)[static_cast<std::size_t>(an)];
  return (n < 0 && an % 2 == 1) ? -v : v;
}

std::complex<double> envelope_F(double x, double y, double t, double omega,
                                const EnvelopeConfig& config) {
  if (!(omega > 0)) throw std::invalid_argument("envelope_F: omega must be > 0");
  const double z = -y / omega;
  const int minimum = EnvelopeConfig::minimum_truncation(z);
  if (config.truncation < minimum) {
    throw std::invalid_argument("envelope_F: truncation " + std::to_string(config.truncation) +
                                " below required " + std::to_string(minimum));
  }
  if (t == 0.0) return {0.0, 0.0};
  const int nt = config.truncation;
  const std::vector<double> jn = bessel_j_sequence(nt, z);
  static const std::complex<double> kPowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

  std::complex<double> sum{0.0, 0.0};
  for (int n = -nt; n <= nt; ++n) {
    const int an = std::abs(n);
    double j = jn[static_cast<std::size_t>(an)];
    if (n < 0 && an % 2 == 1) j = -j;
    if (j == 0.0) continue;
    const std::complex<double> phase = kPowers[((n % 4) + 4) % 4];
    const double d = x + n * omega;
    if (std::abs(d) < omega * 1e-12) {
      sum += phase * std::complex<double>(0.0, 1.0) * (j * t);
    } else {
      const double th = d * t;
      const double s = std::sin(0.5 * th);
      const std::complex<double> expm1_i(-2.0 * s * s, std::sin(th));
      sum += phase * expm1_i * (j / d);
    }
  }
  return sum;
}

double coupling_coefficient(int n_spins, double s) {
  if (n_spins < 1) throw std::invalid_argument("coupling_coefficient: need at least one spin");
  const double half = 0.5 * n_spins;
  const double steps = s + half;
  if (std::abs(s) > half || std::abs(steps - std::round(steps)) > 1e-9) {
    throw std::invalid_argument("coupling_coefficient: s must be one of -N/2, -N/2+1, ..., N/2");
  }
  return std::sqrt((half + s + 1.0) * (half - s));
}

std::array<std::complex<double>, 4> resonance_strength(const SystemParams& p, double t,
                                                       const EnvelopeConfig& config) {
  const double sig = p.sigma();
  const double del = p.delta();
  const double lam = p.lambda_drive;
  const double w = p.omega_drive;
  return {envelope_F(-sig, -lam, t, w, config), envelope_F(-del, -lam, t, w, config),
          envelope_F(del, lam, t, w, config), envelope_F(sig, lam, t, w, config)};
}

}  // namespace paramp
