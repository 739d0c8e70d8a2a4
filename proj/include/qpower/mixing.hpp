#pragma once

// Continuous two-tone wave mixing on a single two-level sensor.
//
// Two equal tones at omega_0' +/- dw (dw << Gamma1) produce elastic components
// at omega_0' +/- (2p+1) dw with amplitudes
//
//   V_{+-(2p+1)} = (-1)^p G1 tan(theta) tan^p(theta/2) / Lambda * (V_-+ tan(theta/2) - V_+-)
//
//   sin(theta)  = 2 G2 Omega^2 / (G1 |lambda|^2 + 2 G2 Omega^2)
//   1 / Lambda  = lambda G1 / (4 G2 Omega^2),   lambda = G2 + i Delta_d
//
// Amplitudes are in units of the drive amplitude (V_+ = V_- = 1 for equal tones).
// In the weak-drive limit V_{+-1} -> -r V_+- with r the single-tone reflection.

#include <complex>
#include <span>
#include <vector>

#include "qpower/series.hpp"
#include "qpower/units.hpp"

namespace qpower {

struct MixingComponents {
  int order = 0;                      // p
  std::complex<double> v_plus;        // V^sc_{+(2p+1)}
  std::complex<double> v_minus;       // V^sc_{-(2p+1)}
  double theta = 0.0;
  std::complex<double> lambda;
  double central_detuning = 0.0;
};

/// Components p = 0..p_max. Omega = 0 returns all-zero amplitudes.
std::vector<MixingComponents> mixing_amplitudes(const SensorParams& sensor, double rabi,
                                                int p_max, double central_detuning,
                                                double v_plus = 1.0, double v_minus = 1.0);

/// |V^sc_{+3} / V'_-| with V'_- = V_- + V^sc_{-1}, equal tones.
double at_ratio(const SensorParams& sensor, double rabi, double central_detuning);

/// alpha(Delta_d) on a grid given in rad/s; the series stores Delta_d in Hz.
MeasurementSeries at_splitting_trace(const SensorParams& sensor, double rabi,
                                     std::span<const double> central_detunings);

struct AlphaSlice {
  double alpha_m = 0.0;  // V^sc_{-+3} / V'_{+-} at Delta_d = 0
  double chi = 0.5;      // G2 / G1
  double eta = 1.0;
};

AlphaSlice alpha_slice(const SensorParams& sensor, double rabi);

/// eta = 1 - 3 sqrt(chi alpha_m) + (1 - chi/2) alpha_m.
/// Requires chi >= 1/2 and 0 < alpha_m < 0.1.
double eta_correction(double chi, double alpha_m);

/// nu_1 = (G1/8) V'/V^sc_3, optionally multiplied by eta(chi, V^sc_3/V').
double photon_rate_from_slice(const SensorParams& sensor, double v_drive, double v_side3,
                              bool apply_eta);

}  // namespace qpower
