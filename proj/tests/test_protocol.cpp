#include "paramp/protocol.hpp"

#include "paramp/propagator.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace paramp;

namespace {

Covariance4 random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = n(rng);
  return Covariance4(m * m.transpose() + 0.1 * Mat4::Identity());
}

// Image of an axis under the schedule's congruence, up to sign: rotating the
// rank-one covariance v vᵀ gives (Kv)(Kv)ᵀ.
Vec4 rotate_axis(const ProtocolSchedule& s, const Vec4& v) {
  const Mat4 r = beamsplitter_rotation(detuning_rotation(Covariance4(Mat4(v * v.transpose())),
                                                         s.delta_psi),
                                       s.delta_theta)
                     .matrix();
  Eigen::SelfAdjointEigenSolver<Mat4> es(r);
  return es.eigenvectors().col(3) * std::sqrt(es.eigenvalues()(3));
}

QuadratureSpectrum spectrum_with_axis(const Vec4& axis) {
  QuadratureSpectrum s;
  s.variances = {0.14, 0.2, 0.4, 0.5};
  s.axes[0] = axis.normalized();
  for (int i = 1; i < 4; ++i) s.axes[i] = Vec4::Unit(i);
  return s;
}

SystemParams fig5_params() {
  SystemParams p;
  p.g = angular(3.5e6);
  p.with_damping(angular(200e3), angular(200e3));
  p.n_s = 0.125;
  return p;
}

}  // namespace

TEST_CASE("detuning rotation identities") {
  std::mt19937_64 rng(5);
  const Covariance4 c = random_state(rng);
  CHECK((detuning_rotation(c, 0.0).matrix() - c.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((detuning_rotation(c, kTwoPi).matrix() - c.matrix()).cwiseAbs().maxCoeff() < 1e-12);
  for (double phi : {0.3, 1.7, -2.0}) {
    CHECK((detuning_rotation(vacuum_covariance(), phi).matrix() - vacuum_covariance().matrix())
              .cwiseAbs()
              .maxCoeff() < 1e-15);
  }
  // ψ advances by the rotation angle.
  const Vec4 axis = Vec4(0.6, 0.0, -0.8, 0.0);
  const double phi = 0.9;
  Mat4 e = axis * axis.transpose();
  const Mat4 r = detuning_rotation(Covariance4(e), phi).matrix();
  Eigen::SelfAdjointEigenSolver<Mat4> es(r);
  const Vec4 moved = es.eigenvectors().col(3);
  const AxisAngles before = decompose_axis(axis);
  AxisAngles after = decompose_axis(moved(0) < 0 ? Vec4(-moved) : moved);
  CHECK(after.psi - before.psi == doctest::Approx(phi).epsilon(1e-12));
  CHECK(after.theta == doctest::Approx(before.theta).epsilon(1e-12));
}

TEST_CASE("beam-splitter rotation identities") {
  std::mt19937_64 rng(6);
  const Covariance4 c = random_state(rng);
  CHECK((beamsplitter_rotation(c, 0.0).matrix() - c.matrix()).cwiseAbs().maxCoeff() == 0.0);
  const Covariance4 swapped = beamsplitter_rotation(c, kPi / 2);
  CHECK((swapped.mode_a() - c.mode_b()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((swapped.mode_b() - c.mode_a()).cwiseAbs().maxCoeff() < 1e-12);

  for (int trial = 0; trial < 20; ++trial) {
    const Covariance4 x = random_state(rng);
    const double th = 0.37 * trial, ph = 0.51 * trial;
    const auto before = eigen_quadratures(x);
    const auto after = eigen_quadratures(beamsplitter_rotation(detuning_rotation(x, ph), th));
    for (int i = 0; i < 4; ++i) {
      CHECK(after.variances[i] == doctest::Approx(before.variances[i]).epsilon(1e-12));
    }
    const auto nu0 = x.symplectic_eigenvalues();
    const auto nu1 = beamsplitter_rotation(detuning_rotation(x, ph), th).symplectic_eigenvalues();
    CHECK(nu1[0] == doctest::Approx(nu0[0]).epsilon(1e-10));
    CHECK(nu1[1] == doctest::Approx(nu0[1]).epsilon(1e-10));
  }
}

TEST_CASE("axis decomposition round trip") {
  const double th = 0.4, ph = 1.1, ps = 2.3;
  const Vec4 axis(std::cos(th) * std::cos(ph), -std::cos(th) * std::sin(ph),
                  -std::sin(th) * std::cos(ps), std::sin(th) * std::sin(ps));
  const AxisAngles a = decompose_axis(axis);
  CHECK(a.theta == doctest::Approx(th));
  CHECK(a.phi == doctest::Approx(ph));
  CHECK(a.psi == doctest::Approx(ps));
}

TEST_CASE("plan for a real two-mode axis needs no spin rotation") {
  const double th = 0.6;
  const ProtocolSchedule s =
      plan_conversion(spectrum_with_axis(Vec4(std::cos(th), 0, -std::sin(th), 0)),
                      ProtocolTarget::kSingleMode);
  CHECK(s.delta_psi == doctest::Approx(0.0));
  CHECK(s.delta_theta == doctest::Approx(kPi - th));
  CHECK_FALSE(s.already_converted);
}

TEST_CASE("single-mode input: nothing to convert, pi/4 to maximal two-mode") {
  for (const Vec4& axis : {Vec4(0.8, 0.6, 0, 0), Vec4(0, 0, 0.6, -0.8)}) {
    const QuadratureSpectrum s = spectrum_with_axis(axis);
    const ProtocolSchedule single = plan_conversion(s, ProtocolTarget::kSingleMode);
    CHECK(single.already_converted);
    CHECK(single.delta_psi == 0.0);
    CHECK(single.delta_theta == 0.0);
    const ProtocolSchedule two = plan_conversion(s, ProtocolTarget::kMaximalTwoMode);
    CHECK(two.delta_theta == doctest::Approx(kPi / 4));
  }
}

TEST_CASE("plan of the printed two-mode axes") {
  // The second printed axis; the first is not orthogonal to it at the printed precision.
  const Vec4 q2(0.52, 0.55, 0.47, -0.44);
  const ProtocolSchedule s2 = plan_conversion(spectrum_with_axis(q2), ProtocolTarget::kSingleMode);
  CHECK(s2.delta_psi / kPi == doctest::Approx(0.55).epsilon(0.1));
  CHECK(s2.delta_theta / kPi == doctest::Approx(0.75).epsilon(0.1));
}

TEST_CASE("planned rotation makes the selected axis single-mode") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const Covariance4 c = random_state(rng);
    const QuadratureSpectrum spec = eigen_quadratures(c);
    const ProtocolSchedule s = plan_conversion(spec, ProtocolTarget::kSingleMode);
    if (s.already_converted) continue;
    const Covariance4 out = beamsplitter_rotation(detuning_rotation(c, s.delta_psi), s.delta_theta);
    const Vec4 moved = rotate_axis(s, s.axis);
    const double weight_a = moved.head<2>().squaredNorm();
    const double weight_b = moved.tail<2>().squaredNorm();
    CHECK(std::max(weight_a, weight_b) > 1.0 - 1e-9);
    CHECK(moved.dot(out.matrix() * moved) == doctest::Approx(s.axis.dot(c.matrix() * s.axis)));
    CHECK(s.delta_psi >= 0.0);
    CHECK(s.delta_psi < kTwoPi);
    CHECK(s.delta_theta >= 0.0);
    CHECK(s.delta_theta < kPi);

    const ProtocolSchedule two = plan_conversion(spec, ProtocolTarget::kMaximalTwoMode);
    const Vec4 moved2 = rotate_axis(two, two.axis);
    CHECK(moved2.head<2>().squaredNorm() == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("plan rejects non-finite spectra and impossible durations") {
  QuadratureSpectrum s = spectrum_with_axis(Vec4(0.5, 0.5, 0.5, 0.5));
  s.variances[2] = std::nan("");
  CHECK_THROWS_AS(plan_conversion(s, ProtocolTarget::kSingleMode), std::invalid_argument);

  const QuadratureSpectrum ok = spectrum_with_axis(Vec4(0.48, 0.44, 0.52, 0.55));
  SystemParams p = fig5_params();
  p.omega_s = p.omega_c;
  CHECK_THROWS_AS(plan_conversion(ok, ProtocolTarget::kSingleMode, p), std::invalid_argument);
  p = fig5_params();
  p.g = 0.0;
  CHECK_THROWS_AS(plan_conversion(ok, ProtocolTarget::kSingleMode, p), std::invalid_argument);
}

TEST_CASE("durations") {
  const SystemParams p = fig5_params();
  const ProtocolSchedule s =
      plan_conversion(spectrum_with_axis(Vec4(0.48, 0.44, 0.52, 0.55)), ProtocolTarget::kSingleMode, p);
  CHECK(s.t1 == doctest::Approx(s.delta_psi / p.delta()));
  CHECK(s.t2 == doctest::Approx(s.delta_theta / p.g));
  CHECK(0.75 * kPi / p.g == doctest::Approx(107e-9).epsilon(0.005));

  SystemParams inverted = p;
  std::swap(inverted.omega_c, inverted.omega_s);
  const ProtocolSchedule r =
      plan_conversion(spectrum_with_axis(Vec4(0.48, 0.44, 0.52, 0.55)), ProtocolTarget::kSingleMode,
                      inverted);
  CHECK(r.t1 > 0);
  CHECK(r.t1 * std::abs(inverted.delta()) ==
        doctest::Approx(std::fmod(kTwoPi - s.delta_psi, kTwoPi)));
}

TEST_CASE("identity schedule returns the input") {
  std::mt19937_64 rng(3);
  const Covariance4 c = random_state(rng);
  const ProtocolResult r = execute_schedule(c, ProtocolSchedule{}, 10);
  CHECK((r.final_state.matrix() - c.matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.path.size() == 21);
  CHECK_THROWS_AS(execute_schedule(c, ProtocolSchedule{}, 0), std::invalid_argument);
}

TEST_CASE("converting the damped steady state") {
  const SystemParams p = fig5_params();
  // Above threshold: the squeezed quadratures settle while the amplified ones grow.
  const SqueezingSteadyState ss = steady_state_squeezing(period_map(p), vacuum_covariance(), 2'000'000);
  const Covariance4& c = ss.state;
  const QuadratureSpectrum spec = eigen_quadratures(c);
  CHECK(squeezing_db(spec.v_min()) < -2.0);

  // Two-mode squeezed: neither mode alone is squeezed.
  const SystemMetrics m0 = system_metrics(c);
  CHECK(m0.va_min > 0.24);
  CHECK(m0.vb_min > 0.24);

  const ProtocolSchedule s = plan_conversion(spec, ProtocolTarget::kSingleMode, p);
  const ProtocolResult r = execute_schedule(c, s);
  CHECK(r.va_min < kVacuumVariance);
  CHECK(r.vb_min < kVacuumVariance);
  CHECK(std::min(r.va_min, r.vb_min) == doctest::Approx(spec.v_min()).epsilon(0.02));
  CHECK(r.path.size() == 401);
  CHECK(r.path.front().stage == 1);
  CHECK(r.path.back().stage == 2);
  CHECK(r.path.back().va_min == doctest::Approx(r.va_min));
  CHECK(r.final_state.is_physical());
}
