#pragma once

// Linearized cavity + spin-ensemble model: parameters, unit conventions,
// bath occupations and the drift/diffusion pair of the covariance equation
//
//   dC/dt = A(t) C + C A(t)^T + G.
//
// Quadrature order everywhere is (X_a, Y_a, X_b, Y_b) with X = (a + a^†)/2,
// so the vacuum variance is 1/4.

#include <Eigen/Dense>

#include <array>
#include <functional>

namespace paramp {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kHbar = 1.054571817e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;   // J / K
inline constexpr double kVacuumVariance = 0.25;

/// Ordinary frequency (Hz) to angular frequency (rad/s).
constexpr double angular(double hz) { return kTwoPi * hz; }
/// Angular frequency (rad/s) to ordinary frequency (Hz).
constexpr double ordinary(double rad_per_s) { return rad_per_s / kTwoPi; }

/// Physical rates and frequencies of the coupled model. All rates are
/// angular (rad/s); configuration files carry ordinary frequencies and go
/// through `angular()`.
struct SystemParams {
  double omega_c = angular(2.5e9);
  double omega_s = angular(3.5e9);
  double g = angular(1.1e6);
  double lambda_drive = angular(1.0e9);
  double omega_drive = angular(6.0e9);
  double gamma_c = angular(100e3);
  double gamma_l = angular(100e3);
  double kappa = angular(200e3);
  double temperature = 0.01;  // K
  double n_s = 0.0;

  double gamma() const { return gamma_c + gamma_l; }
  /// Spin-cavity detuning ω_s − ω_c.
  double delta() const { return omega_s - omega_c; }
  /// ω_s + ω_c, the fundamental sum resonance.
  double sigma() const { return omega_s + omega_c; }
  double period() const { return kTwoPi / omega_drive; }
  /// Instantaneous spin frequency ω_s + Λ sin(ωt).
  double spin_frequency(double t) const;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;

  /// Sets γ_c = γ_l = γ/2 (impedance matched).
  SystemParams& with_matched_cavity(double gamma_total);
  SystemParams& with_damping(double gamma_total, double kappa_rate);
};

/// Bose-Einstein occupation 1/(exp(ħω/k_B T) − 1); zero at T = 0.
double thermal_occupation(double temperature, double omega);

/// n_s = (1 − P)/(2P) for spin polarization P ∈ (0, 1].
double spin_occupation_from_polarization(double polarization);

/// Cavity-bath occupation of the model (the Bose-Einstein formula is
/// applied at the cavity frequency).
inline double cavity_occupation(const SystemParams& p) {
  return thermal_occupation(p.temperature, p.omega_c);
}

/// A(t) of the covariance equation of motion.
Mat4 drift_matrix(const SystemParams& p, double t);

/// G = diag(γ(2n_T+1), γ(2n_T+1), κ(2n_s+1), κ(2n_s+1))/4.
Mat4 diffusion_matrix(const SystemParams& p);

/// Symplectic form pairing (X_a, Y_a) and (X_b, Y_b).
Mat4 symplectic_form();

/// Symmetric covariance of the four quadratures. Every constructor and
/// mutation symmetrizes.
class Covariance4 {
 public:
  Covariance4() : m_(Mat4::Identity() * kVacuumVariance) {}
  explicit Covariance4(const Mat4& m) : m_(0.5 * (m + m.transpose())) {}

  const Mat4& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  /// Moduli of the eigenvalues of Ω⁻¹C, one per mode pair, ascending.
  std::array<double, 2> symplectic_eigenvalues() const;
  /// Smallest symplectic eigenvalue ≥ 1/4 − tol.
  bool is_physical(double tol = 1e-6) const;
  bool is_positive_semidefinite(double tol = 0.0) const;

  double determinant() const { return m_.determinant(); }
  Eigen::Matrix2d mode_a() const { return m_.topLeftCorner<2, 2>(); }
  Eigen::Matrix2d mode_b() const { return m_.bottomRightCorner<2, 2>(); }

 private:
  Mat4 m_;
};

Covariance4 vacuum_covariance();

/// Thermal (uncoupled equilibrium) covariance for cavity/spin occupations.
Covariance4 thermal_covariance(double n_cavity, double n_spin);

/// Time-dependent linear system fed to the propagator: drift A(t), constant
/// diffusion G, and the period over which a one-period map is built.
struct LinearDynamics {
  std::function<Mat4(double)> drift;
  Mat4 diffusion = Mat4::Zero();
  double period = 0.0;
};

/// The frequency-modulated cavity/spin model.
LinearDynamics modulated_dynamics(const SystemParams& p);

}  // namespace paramp
