#include "qpower/bloch.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace qpower {
namespace {

constexpr double kPhysicalTol = 1e-9;

using Bloch = std::array<double, 3>;  // rho11, Re rho10, Im rho10

struct BlochRhs {
  double gamma1;
  double gamma2;
  double rabi;
  double detuning;

  Bloch operator()(const Bloch& y) const {
    const double p = y[0];
    const double u = y[1];
    const double v = y[2];
    return {rabi * v - gamma1 * p,
            -gamma2 * u - detuning * v,
            detuning * u - gamma2 * v - 0.5 * rabi * (2.0 * p - 1.0)};
  }
};

Bloch axpy(const Bloch& y, double h, const Bloch& k) {
  return {y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2]};
}

Bloch rk4_step(const BlochRhs& f, const Bloch& y, double h) {
  const Bloch k1 = f(y);
  const Bloch k2 = f(axpy(y, 0.5 * h, k1));
  const Bloch k3 = f(axpy(y, 0.5 * h, k2));
  const Bloch k4 = f(axpy(y, h, k3));
  Bloch out;
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

Bloch to_bloch(const DensityState& s) { return {s.rho11, s.rho10.real(), s.rho10.imag()}; }
DensityState from_bloch(const Bloch& y) { return {y[0], {y[1], y[2]}}; }

BlochRhs make_rhs(const SensorParams& sensor, const DriveConfig& drive) {
  return {sensor.gamma1(), sensor.gamma2(), drive.rabi, drive.detuning(sensor)};
}

void check_step(const Bloch& y, double t) {
  if (!from_bloch(y).is_physical(kPhysicalTol)) {
    throw IntegrationError("non-physical state at t = " + std::to_string(t) +
                           " s; reduce the step size");
  }
}

// Integrates over [0, duration] with n equal steps, calling visit(t, y) after each.
template <class Visit>
Bloch integrate(const BlochRhs& f, Bloch y, double t0, double duration, double h_max,
                Visit&& visit) {
  if (duration <= 0.0) return y;
  const auto n = static_cast<long long>(std::ceil(duration / h_max));
  const double h = duration / static_cast<double>(n);
  for (long long i = 1; i <= n; ++i) {
    y = rk4_step(f, y, h);
    const double t = t0 + duration * static_cast<double>(i) / static_cast<double>(n);
    check_step(y, t);
    visit(t, y);
  }
  return y;
}

void check_times(double t_end, double dt_max) {
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be > 0");
  if (!(dt_max > 0.0)) throw DomainError("dt_max must be > 0");
}

}  // namespace

bool DensityState::is_physical(double tol) const {
  if (!std::isfinite(rho11) || !std::isfinite(rho10.real()) || !std::isfinite(rho10.imag())) {
    return false;
  }
  if (rho11 < -tol || rho11 > 1.0 + tol) return false;
  return std::norm(rho10) <= rho11 * (1.0 - rho11) + tol;
}

DensityState steady_state(const SensorParams& sensor, const DriveConfig& drive) {
  const double g1 = sensor.gamma1();
  const double g2 = sensor.gamma2();
  const double rabi = drive.rabi;
  const double dw = drive.detuning(sensor);
  if (rabi == 0.0) return DensityState::ground();

  // rho10 = i(Omega/2)(G2 + i dw) / D,  rho11 = Omega^2 G2 / (2 G1 D)
  const double saturation = rabi * rabi * g2 / g1;
  const double denom = g2 * g2 + dw * dw + saturation;
  DensityState s;
  s.rho11 = 0.5 * saturation / denom;
  s.rho10 = std::complex<double>(-dw, g2) * (0.5 * rabi / denom);
  return s;
}

double max_step(const SensorParams& sensor, const DriveConfig& drive, double dt_max) {
  const double fastest = std::max({sensor.gamma1(), sensor.gamma2(), drive.rabi,
                                   std::abs(drive.detuning(sensor))});
  return std::min(dt_max, 1.0 / (50.0 * fastest));
}

Trajectory evolve(const SensorParams& sensor, const DriveConfig& drive,
                  const DensityState& initial, double t_end, double dt_max) {
  check_times(t_end, dt_max);
  if (!initial.is_physical(kPhysicalTol)) throw DomainError("initial state is not physical");
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(initial);
  integrate(make_rhs(sensor, drive), to_bloch(initial), 0.0, t_end,
            max_step(sensor, drive, dt_max), [&](double t, const Bloch& y) {
              traj.times.push_back(t);
              traj.states.push_back(from_bloch(y));
            });
  return traj;
}

DensityState propagate(const SensorParams& sensor, const DriveConfig& drive,
                       const DensityState& initial, double t_end, double dt_max) {
  check_times(t_end, dt_max);
  if (!initial.is_physical(kPhysicalTol)) throw DomainError("initial state is not physical");
  const Bloch y = integrate(make_rhs(sensor, drive), to_bloch(initial), 0.0, t_end,
                            max_step(sensor, drive, dt_max), [](double, const Bloch&) {});
  return from_bloch(y);
}

DensityState integrate_to_steady_state(const SensorParams& sensor, const DriveConfig& drive,
                                       double settle) {
  const double slowest = std::min(sensor.gamma1(), sensor.gamma2());
  const double t_end = settle / slowest;
  return propagate(sensor, drive, DensityState::ground(), t_end, t_end);
}

MeasurementSeries rabi_trace(const SensorParams& sensor, const DriveConfig& drive,
                             std::span<const double> pulse_lengths) {
  if (pulse_lengths.empty()) throw DomainError("rabi_trace: no pulse lengths");
  for (double tau : pulse_lengths) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
      throw DomainError("rabi_trace: pulse lengths must be positive");
    }
  }

  std::vector<std::size_t> order(pulse_lengths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pulse_lengths[a] < pulse_lengths[b];
  });

  MeasurementSeries out;
  out.method = Method::rabi;
  out.x.assign(pulse_lengths.begin(), pulse_lengths.end());
  out.y.assign(pulse_lengths.size(), {0.0, 0.0});
  out.sigma.assign(pulse_lengths.size(), 0.0);

  const BlochRhs rhs = make_rhs(sensor, drive);
  const double h_max = max_step(sensor, drive, pulse_lengths[order.back()]);
  Bloch y = to_bloch(DensityState::ground());
  double t = 0.0;
  // One trajectory from t = 0; every pulse length is a stopping point on it.
  for (std::size_t idx : order) {
    const double tau = pulse_lengths[idx];
    y = integrate(rhs, y, t, tau - t, h_max, [](double, const Bloch&) {});
    t = tau;
    out.y[idx] = {y[2], 0.0};
  }
  return out;
}

}  // namespace qpower
