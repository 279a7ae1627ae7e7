#include "paramp/propagator.hpp"

#include "paramp/errors.hpp"
#include "paramp/ode.hpp"

#include <cmath>
#include <stdexcept>

namespace paramp {

namespace {

using PhiAndDee = Eigen::Matrix<double, 4, 8>;

constexpr double kOverflowLimit = 1e150;

void check_tolerance(double rel_tol) {
  if (!(rel_tol >= 1e-14 && rel_tol <= 1e-3)) {
    throw std::invalid_argument("rel_tol must lie in [1e-14, 1e-3]");
  }
}

ode::Options options_for(double rel_tol) {
  ode::Options o;
  o.rel_tol = rel_tol;
  o.abs_tol = 1e-14;
  return o;
}

}  // namespace

double PeriodMap::spectral_radius() const {
  Eigen::EigenSolver<Mat4> es(phi, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Covariance4 PeriodMap::apply(const Covariance4& c) const {
  return Covariance4(phi * c.matrix() * phi.transpose() + dee);
}

Covariance4 integrate_interval(const Covariance4& c0, double t0, double t1,
                               const LinearDynamics& dyn, double rel_tol) {
  check_tolerance(rel_tol);
  if (!(t1 > t0)) throw std::invalid_argument("integrate_interval: t1 must exceed t0");
  const Mat4& g = dyn.diffusion;
  auto rhs = [&](double t, const Mat4& c) -> Mat4 {
    const Mat4 a = dyn.drift(t);
    return a * c + c * a.transpose() + g;
  };
  return Covariance4(ode::integrate(rhs, c0.matrix(), t0, t1, options_for(rel_tol)));
}

Covariance4 integrate_interval(const Covariance4& c0, double t0, double t1,
                               const SystemParams& params, double rel_tol) {
  return integrate_interval(c0, t0, t1, modulated_dynamics(params), rel_tol);
}

PeriodMap period_map(const LinearDynamics& dyn, double rel_tol) {
  check_tolerance(rel_tol);
  if (!(dyn.period > 0)) throw std::invalid_argument("period_map: period must be > 0");
  const Mat4& g = dyn.diffusion;
  auto rhs = [&](double t, const PhiAndDee& y) -> PhiAndDee {
    const Mat4 a = dyn.drift(t);
    const Mat4 d = y.rightCols<4>();
    PhiAndDee dy;
    dy.leftCols<4>() = a * y.leftCols<4>();
    dy.rightCols<4>() = a * d + d * a.transpose() + g;
    return dy;
  };
  PhiAndDee y0;
  y0.leftCols<4>() = Mat4::Identity();
  y0.rightCols<4>() = Mat4::Zero();
  const PhiAndDee y = ode::integrate(rhs, y0, 0.0, dyn.period, options_for(rel_tol));

  PeriodMap map;
  map.phi = y.leftCols<4>();
  const Mat4 d = y.rightCols<4>();
  map.dee = 0.5 * (d + d.transpose());
  map.period = dyn.period;
  map.tolerance_used = rel_tol;
  return map;
}

PeriodMap period_map(const SystemParams& params, double rel_tol) {
  return period_map(modulated_dynamics(params), rel_tol);
}

Covariance4 iterate_periods(const Covariance4& c0, const PeriodMap& map, std::size_t n) {
  Mat4 c = c0.matrix();
  const Mat4 phi_t = map.phi.transpose();
  for (std::size_t i = 1; i <= n; ++i) {
    Mat4 next = map.phi * c * phi_t + map.dee;
    c = 0.5 * (next + next.transpose());
    const double norm = c.cwiseAbs().maxCoeff();
    if (!std::isfinite(norm) || norm > kOverflowLimit) {
      throw OverflowError("iterate_periods: covariance overflow", i);
    }
  }
  return Covariance4(c);
}

Trajectory build_trajectory(const Covariance4& c0, const PeriodMap& map,
                            const SystemParams& params, std::size_t n_periods,
                            std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("build_trajectory: stride must be >= 1");
  Trajectory traj;
  traj.params = params;
  traj.samples.reserve(n_periods / stride + 1);
  traj.samples.push_back({0.0, c0});
  Covariance4 c = c0;
  for (std::size_t done = stride; done <= n_periods; done += stride) {
    c = iterate_periods(c, map, stride);
    traj.samples.push_back({static_cast<double>(done) * map.period, c});
  }
  return traj;
}

Covariance4 floquet_steady_state(const PeriodMap& map) {
  const double rho = map.spectral_radius();
  if (!(rho < 1.0 - 1e-9)) {
    throw UnstableError("floquet_steady_state: spectral radius " + std::to_string(rho) +
                            " >= 1, no steady state (amplifier above threshold)",
                        rho);
  }
  // Column-major vec: vec(Φ C Φᵀ) = (Φ ⊗ Φ) vec(C).
  Eigen::Matrix<double, 16, 16> kron;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      kron.block<4, 4>(4 * i, 4 * j) = map.phi(i, j) * map.phi;
    }
  }
  const Eigen::Matrix<double, 16, 16> lhs = Eigen::Matrix<double, 16, 16>::Identity() - kron;
  const Eigen::Matrix<double, 16, 1> rhs = Eigen::Map<const Eigen::Matrix<double, 16, 1>>(map.dee.data());
  const Eigen::Matrix<double, 16, 1> sol = lhs.fullPivLu().solve(rhs);
  return Covariance4(Eigen::Map<const Mat4>(sol.data()));
}

}  // namespace paramp
