#include "qpower/scattering.hpp"

#include <algorithm>
#include <cmath>

namespace qpower {

std::complex<double> reflection(const SensorParams& sensor, double rabi, double detuning) {
  if (!(rabi >= 0.0)) throw DomainError("reflection: rabi must be >= 0");
  const double g1 = sensor.gamma1();
  const double g2 = sensor.gamma2();
  const double x = detuning / g2;
  const double denom = 1.0 + x * x + rabi * rabi / (g1 * g2);
  return (g1 / (2.0 * g2)) * std::complex<double>(1.0, x) / denom;
}

ReflectionPoint reflection_point(const SensorParams& sensor, double rabi, double detuning) {
  const auto r = reflection(sensor, rabi, detuning);
  return {detuning, r, 1.0 - r};
}

double max_reflection(const SensorParams& sensor) {
  return sensor.gamma1() / (2.0 * sensor.gamma2());
}

double extinction(const SensorParams& sensor, double rabi, double detuning) {
  return 1.0 - std::norm(1.0 - reflection(sensor, rabi, detuning));
}

double power_from_reflection(double r_res, const SensorParams& sensor) {
  const double ceiling = max_reflection(sensor);
  if (!(r_res > 0.0) || r_res > ceiling * (1.0 + 1e-12)) {
    throw DomainError("power_from_reflection: r_res must lie in (0, G1/(2 G2)]");
  }
  const double rate = sensor.gamma1() / (4.0 * r_res) - 0.5 * sensor.gamma2();
  return std::max(rate, 0.0) * kHbar * sensor.omega_a();
}

double photon_rate(double rabi, double gamma1) {
  if (!(gamma1 > 0.0)) throw DomainError("photon_rate: gamma1 must be > 0");
  return rabi * rabi / (2.0 * gamma1);
}

double absolute_power(double rabi, double gamma1, double omega) {
  return photon_rate(rabi, gamma1) * kHbar * omega;
}

double rabi_from_power(double w0, double gamma1, double omega) {
  if (!(w0 >= 0.0)) throw DomainError("rabi_from_power: power must be >= 0");
  return std::sqrt(2.0 * gamma1 * w0 / (kHbar * omega));
}

double gamma1_dipole(double mu, double omega, double impedance) {
  return mu * mu * omega * impedance / kHbar;
}

double mu_from_gamma1(double gamma1, double omega, double impedance) {
  if (!(gamma1 > 0.0) || !(omega > 0.0) || !(impedance > 0.0)) {
    throw DomainError("mu_from_gamma1: arguments must be positive");
  }
  return std::sqrt(kHbar * gamma1 / (omega * impedance));
}

double detuned_reflection_ratio(double omega, double coupling_capacitance, double z0) {
  const double a = 0.5 * omega * coupling_capacitance * z0;
  return a * a;
}

}  // namespace qpower
