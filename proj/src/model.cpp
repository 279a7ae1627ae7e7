#include "paramp/model.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace paramp {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SystemParams: ") + what);
}

}  // namespace

double SystemParams::spin_frequency(double t) const {
  return omega_s + lambda_drive * std::sin(omega_drive * t);
}

void SystemParams::validate() const {
  require(std::isfinite(omega_c) && omega_c > 0, "omega_c must be > 0");
  require(std::isfinite(omega_s) && omega_s > 0, "omega_s must be > 0");
  require(std::isfinite(omega_drive) && omega_drive > 0, "omega_drive must be > 0");
  require(std::isfinite(g) && g >= 0, "g must be >= 0");
  require(std::isfinite(lambda_drive) && lambda_drive >= 0, "lambda_drive must be >= 0");
  require(std::isfinite(gamma_c) && gamma_c >= 0, "gamma_c must be >= 0");
  require(std::isfinite(gamma_l) && gamma_l >= 0, "gamma_l must be >= 0");
  require(std::isfinite(kappa) && kappa >= 0, "kappa must be >= 0");
  require(std::isfinite(temperature) && temperature >= 0, "temperature must be >= 0");
  require(std::isfinite(n_s) && n_s >= 0, "n_s must be >= 0");
}

SystemParams& SystemParams::with_matched_cavity(double gamma_total) {
  gamma_c = 0.5 * gamma_total;
  gamma_l = 0.5 * gamma_total;
  return *this;
}

SystemParams& SystemParams::with_damping(double gamma_total, double kappa_rate) {
  with_matched_cavity(gamma_total);
  kappa = kappa_rate;
  return *this;
}

double thermal_occupation(double temperature, double omega) {
  if (!(omega > 0)) throw std::invalid_argument("thermal_occupation: omega must be > 0");
  if (!(temperature >= 0)) throw std::invalid_argument("thermal_occupation: temperature must be >= 0");
  if (temperature == 0.0) return 0.0;
  const double x = kHbar * omega / (kBoltzmann * temperature);
  return 1.0 / std::expm1(x);
}

double spin_occupation_from_polarization(double polarization) {
  if (!(polarization > 0.0 && polarization <= 1.0)) {
    throw std::invalid_argument("spin_occupation_from_polarization: P must lie in (0, 1]");
  }
  return (1.0 - polarization) / (2.0 * polarization);
}

Mat4 drift_matrix(const SystemParams& p, double t) {
  const double half_gamma = 0.5 * p.gamma();
  const double half_kappa = 0.5 * p.kappa;
  const double spin = p.spin_frequency(t);
  Mat4 a;
  // clang-format off
  a << -half_gamma,  p.omega_c,   0.0,         0.0,
       -p.omega_c,  -half_gamma, -2.0 * p.g,   0.0,
        0.0,         0.0,        -half_kappa,  spin,
       -2.0 * p.g,   0.0,        -spin,       -half_kappa;
  // clang-format on
  return a;
}

Mat4 diffusion_matrix(const SystemParams& p) {
  const double n_t = cavity_occupation(p);
  const double cavity = p.gamma() * (2.0 * n_t + 1.0) / 4.0;
  const double spin = p.kappa * (2.0 * p.n_s + 1.0) / 4.0;
  return Vec4(cavity, cavity, spin, spin).asDiagonal();
}

Mat4 symplectic_form() {
  Mat4 omega = Mat4::Zero();
  omega(0, 1) = 1.0;
  omega(1, 0) = -1.0;
  omega(2, 3) = 1.0;
  omega(3, 2) = -1.0;
  return omega;
}

std::array<double, 2> Covariance4::symplectic_eigenvalues() const {
  std::array<double, 4> moduli{};
  Eigen::SelfAdjointEigenSolver<Mat4> sa(m_);
  if (sa.eigenvalues()(0) > 0) {
    // ν are the moduli of the eigenvalues of the Hermitian i C^½ Ω C^½, which
    // stay accurate when the two pairs are degenerate.
    const Mat4 root = sa.operatorSqrt();
    const Mat4 m = root * symplectic_form() * root;
    using Cmat = Eigen::Matrix<std::complex<double>, 4, 4>;
    const Cmat h = std::complex<double>(0.0, 1.0) * m.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Cmat> hs(h, Eigen::EigenvaluesOnly);
    for (int i = 0; i < 4; ++i) moduli[i] = std::abs(hs.eigenvalues()(i));
  } else {
    // Ω⁻¹ = −Ω; eigenvalues of Ω⁻¹C come in ±iν pairs.
    Eigen::EigenSolver<Mat4> es(-symplectic_form() * m_, false);
    for (int i = 0; i < 4; ++i) moduli[i] = std::abs(es.eigenvalues()[i]);
  }
  std::sort(moduli.begin(), moduli.end());
  return {0.5 * (moduli[0] + moduli[1]), 0.5 * (moduli[2] + moduli[3])};
}

bool Covariance4::is_physical(double tol) const {
  return symplectic_eigenvalues()[0] >= kVacuumVariance - tol;
}

bool Covariance4::is_positive_semidefinite(double tol) const {
  Eigen::SelfAdjointEigenSolver<Mat4> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) >= -tol;
}

Covariance4 vacuum_covariance() { return Covariance4(); }

Covariance4 thermal_covariance(double n_cavity, double n_spin) {
  const double va = (2.0 * n_cavity + 1.0) / 4.0;
  const double vb = (2.0 * n_spin + 1.0) / 4.0;
  return Covariance4(Mat4(Vec4(va, va, vb, vb).asDiagonal()));
}

LinearDynamics modulated_dynamics(const SystemParams& p) {
  p.validate();
  LinearDynamics dyn;
  dyn.drift = [p](double t) { return drift_matrix(p, t); };
  dyn.diffusion = diffusion_matrix(p);
  dyn.period = p.period();
  return dyn;
}

}  // namespace paramp
