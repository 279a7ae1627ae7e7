#include "paramp/protocol.hpp"

#include <cmath>
#include <stdexcept>

namespace paramp {

namespace {

constexpr double kSingleModeTol = 1e-9;

double wrap(double angle, double period) {
  double r = std::fmod(angle, period);
  if (r < 0) r += period;
  if (r >= period) r -= period;
  return r;
}

Mat4 detuning_matrix(double phi) {
  Mat4 k = Mat4::Identity();
  const double c = std::cos(phi), s = std::sin(phi);
  k(2, 2) = c;
  k(2, 3) = s;
  k(3, 2) = -s;
  k(3, 3) = c;
  return k;
}

Mat4 beamsplitter_matrix(double theta) {
  Mat4 k = Mat4::Zero();
  const double c = std::cos(theta), s = std::sin(theta);
  for (int q = 0; q < 2; ++q) {
    k(q, q) = c;
    k(q, q + 2) = s;
    k(q + 2, q) = -s;
    k(q + 2, q + 2) = c;
  }
  return k;
}

double eigmin2(const Eigen::Matrix2d& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

Vec4 min_axis_of_mode(const Covariance4& c, int offset) {
  const Eigen::Matrix2d block = c.matrix().block<2, 2>(offset, offset);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block);
  Vec4 v = Vec4::Zero();
  v.segment<2>(offset) = es.eigenvectors().col(0);
  return v;
}

double sd_along(const Covariance4& c, const Vec4& v) {
  return std::sqrt(std::max(0.0, v.dot(c.matrix() * v)));
}

}  // namespace

AxisAngles decompose_axis(const Vec4& axis) {
  const double wa = std::hypot(axis(0), axis(1));
  const double wb = std::hypot(axis(2), axis(3));
  AxisAngles out;
  out.theta = std::atan2(wb, wa);
  out.phi = wa > 0 ? wrap(std::atan2(-axis(1), axis(0)), kTwoPi) : 0.0;
  out.psi = wb > 0 ? wrap(std::atan2(axis(3), -axis(2)), kTwoPi) : 0.0;
  return out;
}

Covariance4 detuning_rotation(const Covariance4& c, double phi) {
  const Mat4 k = detuning_matrix(phi);
  return Covariance4(k * c.matrix() * k.transpose());
}

Covariance4 beamsplitter_rotation(const Covariance4& c, double theta) {
  const Mat4 k = beamsplitter_matrix(theta);
  return Covariance4(k * c.matrix() * k.transpose());
}

ProtocolSchedule plan_conversion(const QuadratureSpectrum& spectrum, ProtocolTarget target) {
  for (int i = 0; i < 4; ++i) {
    if (!std::isfinite(spectrum.variances[i]) || !spectrum.axes[i].allFinite() ||
        spectrum.axes[i].norm() < 0.5) {
      throw std::invalid_argument("plan_conversion: spectrum is not finite or axes are degenerate");
    }
  }
  Vec4 axis = spectrum.axes[0];
  const double v0 = spectrum.variances[0];
  const double v1 = spectrum.variances[1];
  if (v1 - v0 <= 1e-2 * std::abs(v0) && std::abs(spectrum.axes[1](0)) > std::abs(axis(0))) {
    axis = spectrum.axes[1];
  }
  axis.normalize();

  ProtocolSchedule s;
  s.target = target;
  s.axis = axis;
  s.angles = decompose_axis(axis);
  const double theta = s.angles.theta;
  const bool single_mode = std::min(std::cos(theta), std::sin(theta)) < kSingleModeTol;

  if (target == ProtocolTarget::kSingleMode) {
    if (single_mode) {
      s.already_converted = true;
      return s;
    }
    s.delta_psi = wrap(s.angles.phi - s.angles.psi, kTwoPi);
    s.delta_theta = wrap(-theta, kPi);
  } else {
    if (!single_mode) s.delta_psi = wrap(s.angles.phi - s.angles.psi, kTwoPi);
    s.delta_theta = wrap(kPi / 4 - theta, kPi / 2);
    s.already_converted = s.delta_psi == 0.0 && std::abs(s.delta_theta) < kSingleModeTol;
  }
  return s;
}

ProtocolSchedule plan_conversion(const QuadratureSpectrum& spectrum, ProtocolTarget target,
                                 const SystemParams& p) {
  ProtocolSchedule s = plan_conversion(spectrum, target);
  s.detuning = p.delta();
  s.g_used = p.g;
  if (s.delta_psi > 0) {
    if (s.detuning == 0) {
      throw std::invalid_argument("plan_conversion: a spin-phase rotation needs nonzero detuning");
    }
    const double angle = s.detuning > 0 ? s.delta_psi : wrap(-s.delta_psi, kTwoPi);
    s.t1 = angle / std::abs(s.detuning);
  }
  if (s.delta_theta > 0) {
    if (!(p.g > 0)) throw std::invalid_argument("plan_conversion: beam-splitter step needs g > 0");
    s.t2 = s.delta_theta / p.g;
  }
  return s;
}

ProtocolResult execute_schedule(const Covariance4& c, const ProtocolSchedule& schedule,
                                int substeps) {
  if (substeps < 1) throw std::invalid_argument("execute_schedule: substeps must be >= 1");
  const Covariance4 mid = detuning_rotation(c, schedule.delta_psi);
  const Covariance4 final_state = beamsplitter_rotation(mid, schedule.delta_theta);

  const QuadratureSpectrum initial = eigen_quadratures(c);
  const Vec4 q1 = initial.axes[0];
  const Vec4 q2 = initial.axes[1];
  const Vec4 ta = min_axis_of_mode(final_state, 0);
  const Vec4 tb = min_axis_of_mode(final_state, 2);

  ProtocolResult out;
  out.path.reserve(2 * static_cast<std::size_t>(substeps) + 2);
  const auto record = [&](int stage, double angle, const Covariance4& state) {
    ProtocolSample s;
    s.stage = stage;
    s.angle = angle;
    s.sd_q1 = sd_along(state, q1);
    s.sd_q2 = sd_along(state, q2);
    s.sd_mode_a = sd_along(state, ta);
    s.sd_mode_b = sd_along(state, tb);
    s.va_min = eigmin2(state.mode_a());
    s.vb_min = eigmin2(state.mode_b());
    out.path.push_back(s);
  };
  for (int i = 0; i <= substeps; ++i) {
    const double a = schedule.delta_psi * i / substeps;
    record(1, a, detuning_rotation(c, a));
  }
  for (int i = 1; i <= substeps; ++i) {
    const double a = schedule.delta_theta * i / substeps;
    record(2, a, beamsplitter_rotation(mid, a));
  }
  out.final_state = final_state;
  out.va_min = eigmin2(final_state.mode_a());
  out.vb_min = eigmin2(final_state.mode_b());
  return out;
}

}  // namespace paramp
