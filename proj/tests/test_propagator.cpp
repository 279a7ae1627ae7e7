#include "paramp/propagator.hpp"

#include "oracles.hpp"
#include "paramp/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace paramp;

namespace {

SystemParams undamped() {
  SystemParams p;
  p.g = angular(3.5e6);
  p.gamma_c = p.gamma_l = p.kappa = 0.0;
  return p;
}

SystemParams strongly_damped() {
  SystemParams p;
  p.g = angular(3.5e6);
  p.lambda_drive = angular(200e6);
  p.with_damping(angular(1e6), angular(1e6));
  p.temperature = 0.05;
  p.n_s = 0.125;
  return p;
}

}  // namespace

TEST_CASE("undamped period map is symplectic") {
  for (double lambda_hz : {0.0, 3.55e8, 1e9}) {
    SystemParams p = undamped();
    p.lambda_drive = angular(lambda_hz);
    const PeriodMap m = period_map(p);
    const Mat4 om = symplectic_form();
    CHECK((m.phi.transpose() * om * m.phi - om).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(m.dee.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("period map agrees with a fixed-step RK4 reference") {
  SystemParams p = strongly_damped();
  p.lambda_drive = angular(1e9);
  p.temperature = 300.0;
  const LinearDynamics dyn = modulated_dynamics(p);
  const PeriodMap adaptive = period_map(dyn);
  const PeriodMap reference = oracle::rk4_period_map(dyn, 100000);
  CHECK(oracle::max_rel_diff(adaptive.phi, reference.phi) < 1e-8);
  CHECK(oracle::max_rel_diff(adaptive.dee, reference.dee) < 1e-8);
}

TEST_CASE("one application of the map equals direct integration over a period") {
  const SystemParams p = strongly_damped();
  const Covariance4 c0 = thermal_covariance(0.3, 0.1);
  const Covariance4 via_map = period_map(p).apply(c0);
  const Covariance4 direct = integrate_interval(c0, 0.0, p.period(), p);
  CHECK(oracle::max_rel_diff(via_map.matrix(), direct.matrix()) < 1e-9);
}

TEST_CASE("Floquet fixed point matches long iteration") {
  const SystemParams p = strongly_damped();
  const PeriodMap m = period_map(p);
  REQUIRE(m.spectral_radius() < 1.0);
  const Covariance4 fixed = floquet_steady_state(m);
  const Covariance4 iterated = iterate_periods(vacuum_covariance(), m, 100000);
  CHECK(oracle::max_rel_diff(fixed.matrix(), iterated.matrix()) < 1e-8);
  CHECK(oracle::max_rel_diff(m.apply(fixed).matrix(), fixed.matrix()) < 1e-10);
  CHECK(fixed.is_physical());
}

TEST_CASE("without coupling or drive the modes relax to their thermal states") {
  SystemParams p = strongly_damped();
  p.g = 0.0;
  p.lambda_drive = 0.0;
  p.temperature = 2.0;
  // Per-period integration error is amplified by 1/(1 − ρ) ≈ 2e3 in the fixed point.
  const Covariance4 ss = floquet_steady_state(period_map(p, 1e-12));
  const double nt = cavity_occupation(p);
  CHECK(ss(0, 0) == doctest::Approx((2 * nt + 1) / 4).epsilon(1e-8));
  CHECK(ss(1, 1) == doctest::Approx((2 * nt + 1) / 4).epsilon(1e-8));
  CHECK(ss(2, 2) == doctest::Approx((2 * p.n_s + 1) / 4).epsilon(1e-8));
  CHECK(std::abs(ss(0, 2)) < 1e-12);
}

TEST_CASE("above threshold there is no fixed point") {
  SystemParams p = undamped();
  p.with_damping(angular(200e3), angular(200e3));
  const PeriodMap m = period_map(p);
  CHECK(m.spectral_radius() > 1.0);
  try {
    floquet_steady_state(m);
    FAIL("expected UnstableError");
  } catch (const UnstableError& e) {
    CHECK(e.measure() == doctest::Approx(m.spectral_radius()));
  }
}

TEST_CASE("overflow is reported with the period index") {
  PeriodMap m;
  m.phi = 2.0 * Mat4::Identity();
  m.dee = Mat4::Zero();
  m.period = 1.0;
  try {
    iterate_periods(vacuum_covariance(), m, 1000);
    FAIL("expected OverflowError");
  } catch (const OverflowError& e) {
    // 0.25 * 4^n first exceeds 1e150 at n = 251.
    CHECK(e.period() == 251);
  }
}

TEST_CASE("physicality holds along trajectories") {
  for (const SystemParams& p : {undamped(), strongly_damped()}) {
    const Trajectory traj = build_trajectory(vacuum_covariance(), period_map(p), p, 5000, 250);
    CHECK(traj.samples.size() == 21);
    CHECK(traj.samples.back().time == doctest::Approx(5000 * p.period()));
    for (const Sample& s : traj.samples) {
      CHECK(s.covariance.symplectic_eigenvalues()[0] >= 0.25 - 1e-6);
    }
  }
}

TEST_CASE("tolerance and interval arguments are checked") {
  const SystemParams p = undamped();
  CHECK_THROWS_AS(period_map(p, 1e-2), std::invalid_argument);
  CHECK_THROWS_AS(period_map(p, 1e-16), std::invalid_argument);
  CHECK_THROWS_AS(integrate_interval(vacuum_covariance(), 1.0, 1.0, p), std::invalid_argument);
  CHECK_THROWS_AS(build_trajectory(vacuum_covariance(), period_map(p), p, 10, 0),
                  std::invalid_argument);
  CHECK(period_map(p, 1e-6).tolerance_used == 1e-6);
}
