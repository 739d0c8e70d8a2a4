#pragma once

// Model-specific fitters that turn measured series into Gamma1, Gamma2, k and
// Omega. Every fitter derives its own deterministic starting point from the data.

#include <optional>
#include <span>
#include <vector>

#include "qpower/fit.hpp"
#include "qpower/series.hpp"
#include "qpower/units.hpp"

namespace qpower {

struct LineshapeOptions {
  bool weak_drive = true;      // fix Omega^2 = 0; otherwise co-fit it
  bool real_only = false;      // fit Re r only (requires weak_drive)
  bool fit_offset = false;     // complex additive offset (coherent leakage)
  /// Relative uncertainty of the absolute |r| normalization. Adds the matching
  /// fully correlated systematic to Gamma1 and Omega^2 in the covariance.
  double normalization_rel = 0.0;
  LeastSquaresOptions solver{};
};

/// Parameters: gamma1, gamma2, center (rad/s, relative to derived["reference_hz"]),
/// rabi_sq, offset_re, offset_im. derived["center_hz"] is the absolute centre.
FitResult fit_reflection_lineshape(const MeasurementSeries& data,
                                   const LineshapeOptions& options = {});

/// Sensor with the rates and centre of a lineshape fit.
SensorParams sensor_from_lineshape(const FitResult& fit, std::string label);

/// Resonant reflection measured against generator power.
struct PowerSweep {
  std::vector<double> w_in;   // W
  std::vector<double> r_res;  // Re r at zero detuning
  std::vector<double> sigma;
};

struct PowerSweepOptions {
  bool fit_offset = false;
  LeastSquaresOptions solver{};
};

/// Fits Re r = G1/(2 G2) / (1 + k W_in/(G1 G2)) + offset with the sensor's rates
/// held fixed. Parameters: k, offset. derived["dlnk_dgamma1"] and
/// derived["dlnk_dgamma2"] give the sensitivity of k to the fixed rates.
FitResult fit_r_vs_power(const PowerSweep& data, const SensorParams& sensor,
                         const PowerSweepOptions& options = {});

/// A exp(-decay t) cos(rabi t + phase) + offset. Parameters in that order:
/// rabi, decay, amplitude, phase, offset. rabi is the observed oscillation
/// frequency.
FitResult fit_damped_sinusoid(const MeasurementSeries& data,
                              const LeastSquaresOptions& solver = {});

/// Drive Rabi frequency from the observed oscillation frequency of a resonant
/// trace: the Bloch equations oscillate at sqrt(Omega^2 - ((G1 - G2)/2)^2).
double rabi_from_oscillation(double oscillation, const SensorParams& sensor);

/// Derivative d rabi / d oscillation, for error propagation.
double rabi_oscillation_jacobian(double oscillation, const SensorParams& sensor);

/// scale * triplet density, sensor rates fixed, centre at the sensor frequency.
/// Parameters: rabi, scale. derived["gain_db"] = 10 log10(scale).
FitResult fit_mollow(const MeasurementSeries& data, const SensorParams& sensor,
                     const LeastSquaresOptions& solver = {});

/// scale * |V_{+3}/V'_-|(Delta_d), sensor rates fixed. Parameters: rabi, scale.
FitResult fit_at_splitting(const MeasurementSeries& data, const SensorParams& sensor,
                           const LeastSquaresOptions& solver = {});

/// Distance (Hz) between the highest points left and right of the series
/// centre; 0 if the global maximum sits at the centre.
double peak_separation(const MeasurementSeries& data);

}  // namespace qpower
