#pragma once

// Elastic scattering of a coherent tone on a two-level sensor in an open line.
// The scattered wave is V_sc = -r V_0 with
//   r = (G1/2G2) (1 + i dw/G2) / (1 + (dw/G2)^2 + Omega^2/(G1 G2)),
// and the incident photon rate follows from Omega and the radiative Gamma1.

#include <complex>

#include "qpower/units.hpp"

namespace qpower {

struct ReflectionPoint {
  double detuning = 0.0;
  std::complex<double> r;
  std::complex<double> t;  // 1 - r
};

std::complex<double> reflection(const SensorParams& sensor, double rabi, double detuning);
ReflectionPoint reflection_point(const SensorParams& sensor, double rabi, double detuning);

/// Weak-drive resonant ceiling G1/(2 G2).
double max_reflection(const SensorParams& sensor);

/// Power extinction 1 - |t|^2.
double extinction(const SensorParams& sensor, double rabi = 0.0, double detuning = 0.0);

/// Absolute power at the sensor from the resonant reflection,
/// W0 = (G1/(4 r) - G2/2) hbar omega_a. Throws DomainError unless
/// 0 < r_res <= G1/(2 G2).
double power_from_reflection(double r_res, const SensorParams& sensor);

/// Incident photon rate nu = Omega^2 / (2 Gamma1).
double photon_rate(double rabi, double gamma1);

/// W0 = nu hbar omega.
double absolute_power(double rabi, double gamma1, double omega);

/// Rabi frequency that corresponds to absolute power w0 (inverse of absolute_power).
double rabi_from_power(double w0, double gamma1, double omega);

/// Gamma1 = mu^2 omega Z / hbar and its positive inverse.
double gamma1_dipole(double mu, double omega, double impedance);
double mu_from_gamma1(double gamma1, double omega, double impedance);

/// Reflected fraction of a tone passing a detuned sensor, (omega Cc Z0 / 2)^2.
double detuned_reflection_ratio(double omega, double coupling_capacitance, double z0);

}  // namespace qpower
