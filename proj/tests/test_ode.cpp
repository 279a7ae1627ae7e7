#include "paramp/ode.hpp"

#include <doctest.h>

#include <cmath>

using namespace paramp;

TEST_CASE("DOPRI5 reproduces the harmonic oscillator over many cycles") {
  using V = Eigen::Vector2d;
  const double w = 3.0;
  auto f = [w](double, const V& y) -> V { return V(y(1), -w * w * y(0)); };
  ode::Stats stats;
  const double t1 = 100.0;
  const V y = ode::integrate(f, V(1.0, 0.0), 0.0, t1, ode::Options{}, &stats);
  CHECK(y(0) == doctest::Approx(std::cos(w * t1)).epsilon(1e-8));
  CHECK(y(1) == doctest::Approx(-w * std::sin(w * t1)).epsilon(1e-8));
  CHECK(stats.accepted > 0);
  CHECK(stats.rhs_evaluations >= 6 * stats.accepted);
}

TEST_CASE("loose tolerance takes fewer steps") {
  using V = Eigen::Matrix<double, 1, 1>;
  auto f = [](double t, const V& y) -> V { return V(-2.0 * t * y(0)); };
  ode::Stats tight, loose;
  ode::Options o;
  const V a = ode::integrate(f, V(1.0), 0.0, 3.0, o, &tight);
  o.rel_tol = 1e-5;
  ode::integrate(f, V(1.0), 0.0, 3.0, o, &loose);
  CHECK(a(0) == doctest::Approx(std::exp(-9.0)).epsilon(1e-8));
  CHECK(loose.accepted < tight.accepted);
}

TEST_CASE("step-size underflow reports the failure time") {
  using V = Eigen::Matrix<double, 1, 1>;
  auto f = [](double, const V& y) -> V { return V(y(0) * y(0)); };  // blows up at t = 1
  try {
    ode::integrate(f, V(1.0), 0.0, 2.0, ode::Options{});
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.time() == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("step budget is enforced") {
  using V = Eigen::Vector2d;
  auto f = [](double, const V& y) -> V { return V(y(1), -1e6 * y(0)); };
  ode::Options o;
  o.max_steps = 10;
  CHECK_THROWS_AS(ode::integrate(f, V(1.0, 0.0), 0.0, 10.0, o), IntegrationError);
}
