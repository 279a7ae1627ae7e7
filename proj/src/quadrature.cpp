#include "paramp/quadrature.hpp"

#include "paramp/errors.hpp"
#include "paramp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace paramp {

namespace {

std::array<double, 2> eigen2(const Eigen::Matrix2d& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m, Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(1)};
}

}  // namespace

QuadratureSpectrum eigen_quadratures(const Covariance4& c) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(c.matrix());
  QuadratureSpectrum s;
  for (int i = 0; i < 4; ++i) {
    s.variances[i] = es.eigenvalues()(i);
    Vec4 axis = es.eigenvectors().col(i).normalized();
    for (int k = 0; k < 4; ++k) {
      if (std::abs(axis(k)) > 1e-12) {
        if (axis(k) < 0) axis = -axis;
        break;
      }
    }
    s.axes[i] = axis;
    s.db[i] = s.variances[i] > 0 ? squeezing_db(s.variances[i])
                                 : -std::numeric_limits<double>::infinity();
  }
  return s;
}

double squeezing_db(double variance) {
  if (!(variance > 0)) throw std::invalid_argument("squeezing_db: variance must be > 0");
  return 10.0 * std::log10(2.0 * std::sqrt(variance));
}

SystemMetrics system_metrics(const Covariance4& c) {
  const QuadratureSpectrum s = eigen_quadratures(c);
  SystemMetrics m;
  m.v_min = s.v_min();
  m.v_max = s.v_max();
  m.s_sqz = std::min(0.0, squeezing_db(m.v_min));
  m.s_amp = squeezing_db(m.v_max);
  const auto a = eigen2(c.mode_a());
  const auto b = eigen2(c.mode_b());
  m.va_min = a[0];
  m.va_max = a[1];
  m.vb_min = b[0];
  m.vb_max = b[1];
  return m;
}

RateFit amplification_rate(const Trajectory& traj) {
  const std::size_t n = traj.samples.size();
  const std::size_t skip = n / 20;
  if (n < skip + 10) {
    throw std::invalid_argument("amplification_rate: need at least 10 samples after the transient");
  }
  std::vector<double> t, s;
  t.reserve(n - skip);
  s.reserve(n - skip);
  for (std::size_t i = skip; i < n; ++i) {
    t.push_back(traj.samples[i].time * 1e6);
    s.push_back(squeezing_db(eigen_quadratures(traj.samples[i].covariance).v_max()));
  }
  const double m = static_cast<double>(t.size());
  const double t_mean = std::accumulate(t.begin(), t.end(), 0.0) / m;
  const double s_mean = std::accumulate(s.begin(), s.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxx += (t[i] - t_mean) * (t[i] - t_mean);
    sxy += (t[i] - t_mean) * (s[i] - s_mean);
  }
  RateFit fit;
  fit.db_per_us = sxy / sxx;
  fit.samples_used = t.size();
  bool monotone = true;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] < s[i - 1] - 1e-6) {
      monotone = false;
      break;
    }
  }
  fit.amplifying = monotone && s.back() - s.front() > 1e-3;
  return fit;
}

Covariance4 evolve_from_vacuum(const SystemParams& p, std::size_t n_periods, double rel_tol) {
  return iterate_periods(vacuum_covariance(), period_map(p, rel_tol), n_periods);
}

std::size_t periods_for(const SystemParams& p, double seconds) {
  return static_cast<std::size_t>(std::llround(seconds / p.period()));
}

DrivenPoint simulate_rate(const SystemParams& p, std::size_t n_periods, std::size_t stride,
                          double rel_tol) {
  const PeriodMap map = period_map(p, rel_tol);
  const Trajectory traj = build_trajectory(vacuum_covariance(), map, p, n_periods, stride);
  DrivenPoint out;
  out.rate = amplification_rate(traj);
  out.final_metrics = system_metrics(traj.samples.back().covariance);
  return out;
}

double drive_gain_db(const SystemParams& p, std::size_t n_periods, double rel_tol) {
  SystemParams undriven = p;
  undriven.lambda_drive = 0.0;
  const double driven_amp = system_metrics(evolve_from_vacuum(p, n_periods, rel_tol)).s_amp;
  const double reference = system_metrics(evolve_from_vacuum(undriven, n_periods, rel_tol)).s_amp;
  return driven_amp - reference;
}

SqueezingSteadyState steady_state_squeezing(const PeriodMap& map, const Covariance4& c0,
                                            std::size_t max_periods, double tol_db) {
  SqueezingSteadyState out;
  if (map.spectral_radius() < 1.0 - 1e-9) {
    out.state = floquet_steady_state(map);
    out.s_sqz = system_metrics(out.state).s_sqz;
    out.floquet_fixed_point = true;
    out.converged = true;
    return out;
  }
  // Check spacing follows the relaxation of the squeezed quadratures, whose
  // variance approaches its limit by a factor |λ_min|² per period.
  Eigen::EigenSolver<Mat4> es(map.phi, false);
  const double lambda_min = es.eigenvalues().cwiseAbs().minCoeff();
  const double relax = std::max(1.0 - lambda_min * lambda_min, 1e-12);
  const auto kCheckStride = static_cast<std::size_t>(
      std::clamp(std::ceil(0.05 / relax), 50.0, 100000.0));
  constexpr double kMaxCondition = 1e10;
  Covariance4 c = c0;
  double previous = system_metrics(c).s_sqz;
  int settled = 0;
  std::size_t done = 0;
  while (done < max_periods) {
    const std::size_t step = std::min(kCheckStride, max_periods - done);
    c = iterate_periods(c, map, step);
    done += step;
    const SystemMetrics m = system_metrics(c);
    const double current = squeezing_db(m.v_min);
    if (std::abs(current - previous) < tol_db) {
      if (++settled >= 2) {
        out.converged = true;
        break;
      }
    } else {
      settled = 0;
    }
    previous = current;
    if (m.v_max / m.v_min > kMaxCondition) break;
  }
  out.state = c;
  out.s_sqz = system_metrics(c).s_sqz;
  out.periods = done;
  return out;
}

BandwidthResult fwhm_from_points(std::vector<SweepPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const SweepPoint& a, const SweepPoint& b) { return a.omega_c < b.omega_c; });
  BandwidthResult r;
  r.fwhm_hz = std::numeric_limits<double>::quiet_NaN();
  std::vector<SweepPoint> ok;
  std::copy_if(points.begin(), points.end(), std::back_inserter(ok),
               [](const SweepPoint& p) { return p.ok; });
  r.points = std::move(points);
  if (ok.size() < 3) return r;

  const auto peak = std::max_element(ok.begin(), ok.end(), [](const auto& a, const auto& b) {
    return a.rate_db_per_us < b.rate_db_per_us;
  });
  r.peak_omega_c = peak->omega_c;
  r.peak_rate = peak->rate_db_per_us;
  if (!(r.peak_rate > 0)) return r;
  const double half = 0.5 * r.peak_rate;
  const auto cross = [half](const SweepPoint& inside, const SweepPoint& outside) {
    const double f = (inside.rate_db_per_us - half) /
                     (inside.rate_db_per_us - outside.rate_db_per_us);
    return inside.omega_c + f * (outside.omega_c - inside.omega_c);
  };

  const std::ptrdiff_t ip = peak - ok.begin();
  double left = std::numeric_limits<double>::quiet_NaN();
  for (std::ptrdiff_t i = ip; i > 0; --i) {
    if (ok[i - 1].rate_db_per_us < half) {
      left = cross(ok[i], ok[i - 1]);
      break;
    }
  }
  double right = std::numeric_limits<double>::quiet_NaN();
  for (std::ptrdiff_t i = ip; i + 1 < static_cast<std::ptrdiff_t>(ok.size()); ++i) {
    if (ok[i + 1].rate_db_per_us < half) {
      right = cross(ok[i], ok[i + 1]);
      break;
    }
  }
  if (std::isfinite(left) && std::isfinite(right)) {
    r.bracketed = true;
    r.fwhm_hz = ordinary(right - left);
  }
  return r;
}

BandwidthResult bandwidth_fwhm(const SystemParams& p, const CavitySweep& sweep,
                               std::size_t n_periods, std::size_t stride, std::size_t workers,
                               double rel_tol) {
  if (!(sweep.step > 0) || !(sweep.stop > sweep.start)) {
    throw std::invalid_argument("bandwidth_fwhm: sweep needs start < stop and step > 0");
  }
  const auto count =
      static_cast<std::size_t>(std::floor((sweep.stop - sweep.start) / sweep.step + 1e-9)) + 1;
  auto points = parallel_map<SweepPoint>(count, workers, [&](std::size_t i) {
    SweepPoint pt;
    pt.omega_c = sweep.start + static_cast<double>(i) * sweep.step;
    SystemParams q = p;
    q.omega_c = pt.omega_c;
    try {
      pt.rate_db_per_us = simulate_rate(q, n_periods, stride, rel_tol).rate.db_per_us;
    } catch (const NumericalError&) {
      pt.ok = false;
    }
    return pt;
  });
  return fwhm_from_points(std::move(points));
}

namespace {

struct Axis {
  double lo, hi;
  std::size_t grid;
  bool active() const { return hi > lo; }
  double at(double u) const { return lo + std::clamp(u, 0.0, 1.0) * (hi - lo); }
};

}  // namespace

OptimizeResult optimize_drive(const SystemParams& base, const DriveBox& box,
                              const OptimizeOptions& options) {
  const std::array<Axis, 3> axes{Axis{box.omega_lo, box.omega_hi, 9},
                                 Axis{box.omega_s_lo, box.omega_s_hi, 9},
                                 Axis{box.lambda_lo, box.lambda_hi, 5}};
  for (const auto& a : axes) {
    if (!(a.hi >= a.lo) || !(a.lo > 0 || (&a == &axes[2] && a.lo >= 0))) {
      throw std::invalid_argument("optimize_drive: malformed search box");
    }
  }

  const auto params_at = [&](const std::array<double, 3>& u) {
    SystemParams p = base;
    p.omega_drive = axes[0].at(u[0]);
    p.omega_s = axes[1].at(u[1]);
    p.lambda_drive = axes[2].at(u[2]);
    return p;
  };
  const auto objective = [&](const std::array<double, 3>& u) {
    const SystemParams p = params_at(u);
    try {
      const SystemMetrics m = system_metrics(
          evolve_from_vacuum(p, std::max<std::size_t>(1, periods_for(p, options.evolution_time)),
                             options.rel_tol));
      return options.objective == DriveObjective::kMaxAmplification ? -m.s_amp
                                                                    : squeezing_db(m.v_min);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Coarse grid.
  std::array<std::size_t, 3> counts{};
  for (int d = 0; d < 3; ++d) counts[d] = axes[d].active() ? axes[d].grid : 1;
  const std::size_t total = counts[0] * counts[1] * counts[2];
  const auto grid_u = [&](std::size_t flat) {
    std::array<double, 3> u{};
    std::size_t rest = flat;
    for (int d = 2; d >= 0; --d) {
      const std::size_t idx = rest % counts[d];
      rest /= counts[d];
      u[d] = counts[d] > 1 ? static_cast<double>(idx) / static_cast<double>(counts[d] - 1) : 0.0;
    }
    return u;
  };
  const auto values =
      parallel_map<double>(total, options.workers, [&](std::size_t i) { return objective(grid_u(i)); });
  const std::size_t best_idx =
      static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());

  OptimizeResult result;
  result.grid_evaluations = total;
  std::array<double, 3> best_u = grid_u(best_idx);
  double best_f = values[best_idx];

  // Nelder-Mead over the active coordinates, in unit-box coordinates.
  std::vector<int> active;
  for (int d = 0; d < 3; ++d) {
    if (axes[d].active()) active.push_back(d);
  }
  const std::size_t dim = active.size();
  if (dim == 0) {
    result.converged = true;
  } else {
    using Point = std::array<double, 3>;
    std::vector<Point> simplex(dim + 1, best_u);
    std::vector<double> f(dim + 1, best_f);
    std::size_t evals = 0;
    const auto eval = [&](Point u) {
      for (int d : active) u[d] = std::clamp(u[d], 0.0, 1.0);
      ++evals;
      return std::pair{u, objective(u)};
    };
    for (std::size_t k = 0; k < dim; ++k) {
      const int d = active[k];
      const double step = 1.0 / static_cast<double>(counts[d] - 1);
      Point u = best_u;
      u[d] += u[d] + step <= 1.0 ? step : -step;
      std::tie(simplex[k + 1], f[k + 1]) = eval(u);
    }
    const auto order = [&] {
      std::vector<std::size_t> idx(dim + 1);
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return f[a] < f[b]; });
      std::vector<Point> s2;
      std::vector<double> f2;
      for (auto i : idx) {
        s2.push_back(simplex[i]);
        f2.push_back(f[i]);
      }
      simplex = std::move(s2);
      f = std::move(f2);
    };
    while (true) {
      order();
      double size = 0.0;
      for (std::size_t k = 1; k <= dim; ++k) {
        for (int d : active) size = std::max(size, std::abs(simplex[k][d] - simplex[0][d]));
      }
      if (size < 1e-7 || std::abs(f[dim] - f[0]) < 1e-9) {
        result.converged = true;
        break;
      }
      if (evals >= options.budget) {
        result.budget_exhausted = true;
        break;
      }
      Point centroid{};
      for (std::size_t k = 0; k < dim; ++k) {
        for (int d : active) centroid[d] += simplex[k][d] / static_cast<double>(dim);
      }
      const auto along = [&](double t) {
        Point u = simplex[0];
        for (int d : active) u[d] = centroid[d] + t * (simplex[dim][d] - centroid[d]);
        return u;
      };
      auto [xr, fr] = eval(along(-1.0));
      if (fr < f[0]) {
        auto [xe, fe] = eval(along(-2.0));
        if (fe < fr) {
          simplex[dim] = xe;
          f[dim] = fe;
        } else {
          simplex[dim] = xr;
          f[dim] = fr;
        }
      } else if (fr < f[dim - 1]) {
        simplex[dim] = xr;
        f[dim] = fr;
      } else {
        const bool outside = fr < f[dim];
        auto [xc, fc] = eval(along(outside ? -0.5 : 0.5));
        if (fc < std::min(fr, f[dim])) {
          simplex[dim] = xc;
          f[dim] = fc;
        } else {
          for (std::size_t k = 1; k <= dim; ++k) {
            Point u = simplex[0];
            for (int d : active) u[d] = simplex[0][d] + 0.5 * (simplex[k][d] - simplex[0][d]);
            std::tie(simplex[k], f[k]) = eval(u);
          }
        }
      }
    }
    order();
    if (f[0] < best_f) {
      best_f = f[0];
      best_u = simplex[0];
    }
    result.refine_evaluations = evals;
  }

  result.best = params_at(best_u);
  result.objective_db = options.objective == DriveObjective::kMaxAmplification ? -best_f : best_f;
  return result;
}

}  // namespace paramp
