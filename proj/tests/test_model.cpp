#include "paramp/model.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace paramp;

TEST_CASE("thermal occupation matches the high-temperature series") {
  const double omega = angular(2.5e9);
  const double x = kHbar * omega / (kBoltzmann * 300.0);
  const double series = 1.0 / x - 0.5 + x / 12.0 - x * x * x / 720.0;
  CHECK(thermal_occupation(300.0, omega) == doctest::Approx(series).epsilon(1e-12));
  CHECK(thermal_occupation(300.0, omega) == doctest::Approx(2500.0).epsilon(1.0 / 2500.0));
  CHECK(thermal_occupation(0.0, omega) == 0.0);
  CHECK(thermal_occupation(1e-3, omega) < 1e-50);
  CHECK_THROWS_AS(thermal_occupation(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(thermal_occupation(-1.0, omega), std::invalid_argument);
}

TEST_CASE("spin occupation from polarization") {
  CHECK(spin_occupation_from_polarization(0.8) == doctest::Approx(0.125));
  CHECK(spin_occupation_from_polarization(1.0) == 0.0);
  CHECK_THROWS_AS(spin_occupation_from_polarization(0.0), std::invalid_argument);
  CHECK_THROWS_AS(spin_occupation_from_polarization(1.5), std::invalid_argument);
}

TEST_CASE("undamped drift is Hamiltonian: Omega^T A is symmetric") {
  SystemParams p;
  p.gamma_c = p.gamma_l = p.kappa = 0.0;
  const Mat4 om = symplectic_form();
  for (double t : {0.0, 1.3e-11, 7.7e-11}) {
    const Mat4 h = om.transpose() * drift_matrix(p, t);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-6 * h.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("drift matrix layout") {
  SystemParams p;
  const double t = 2.1e-11;
  const Mat4 a = drift_matrix(p, t);
  const double w = p.spin_frequency(t);
  CHECK(a(0, 0) == doctest::Approx(-p.gamma() / 2));
  CHECK(a(0, 1) == doctest::Approx(p.omega_c));
  CHECK(a(1, 0) == doctest::Approx(-p.omega_c));
  CHECK(a(1, 2) == doctest::Approx(-2 * p.g));
  CHECK(a(3, 0) == doctest::Approx(-2 * p.g));
  CHECK(a(2, 3) == doctest::Approx(w));
  CHECK(a(3, 2) == doctest::Approx(-w));
  CHECK(a(2, 2) == doctest::Approx(-p.kappa / 2));
  CHECK(a(0, 2) == 0.0);
}

TEST_CASE("diffusion matrix") {
  SystemParams p;
  p.temperature = 300.0;
  p.n_s = 0.125;
  const Mat4 g = diffusion_matrix(p);
  const double nt = cavity_occupation(p);
  CHECK(g(0, 0) == doctest::Approx(p.gamma() * (2 * nt + 1) / 4));
  CHECK(g(1, 1) == doctest::Approx(g(0, 0)));
  CHECK(g(2, 2) == doctest::Approx(p.kappa * 1.25 / 4));
  CHECK(g(0, 1) == 0.0);
}

TEST_CASE("covariance invariants") {
  const Covariance4 vac = vacuum_covariance();
  const auto nu = vac.symplectic_eigenvalues();
  CHECK(nu[0] == doctest::Approx(0.25));
  CHECK(nu[1] == doctest::Approx(0.25));
  CHECK(vac.is_physical());

  const Covariance4 th = thermal_covariance(3.0, 0.5);
  const auto nt = th.symplectic_eigenvalues();
  CHECK(nt[0] == doctest::Approx(0.5));
  CHECK(nt[1] == doctest::Approx(1.75));

  Mat4 m = Mat4::Identity() * 0.25;
  m(0, 0) = 0.1;  // squeezed X_a without the matching anti-squeezing
  CHECK_FALSE(Covariance4(m).is_physical());
  CHECK(Covariance4(m).is_positive_semidefinite());

  Mat4 asym = Mat4::Identity();
  asym(0, 1) = 1.0;
  const Covariance4 c(asym);
  CHECK(c(0, 1) == doctest::Approx(0.5));
  CHECK(c(1, 0) == doctest::Approx(0.5));
}

TEST_CASE("parameter validation names the violation") {
  SystemParams p;
  CHECK_NOTHROW(p.validate());
  p.kappa = -1.0;
  CHECK_THROWS_WITH_AS(p.validate(), doctest::Contains("kappa"), std::invalid_argument);
  p = SystemParams{};
  p.omega_drive = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("derived frequencies") {
  SystemParams p;
  CHECK(p.sigma() == doctest::Approx(angular(6e9)));
  CHECK(p.delta() == doctest::Approx(angular(1e9)));
  CHECK(p.period() == doctest::Approx(1.0 / 6e9));
  p.with_damping(angular(200e3), angular(50e3));
  CHECK(p.gamma_c == doctest::Approx(angular(100e3)));
  CHECK(p.gamma_l == doctest::Approx(angular(100e3)));
  CHECK(p.kappa == doctest::Approx(angular(50e3)));
}
