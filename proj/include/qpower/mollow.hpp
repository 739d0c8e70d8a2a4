#pragma once

// Incoherent resonance-fluorescence (Mollow triplet) spectrum under a strong
// resonant drive. Side peaks sit at +/- Omega with half-width (G1+G2)/2, the
// central peak has half-width G2.

#include <optional>
#include <span>
#include <vector>

#include "qpower/units.hpp"

namespace qpower {

struct Spectrum {
  std::vector<double> frequencies_hz;  // strictly increasing
  std::vector<double> density;         // W/Hz
  double center_hz = 0.0;              // sensor transition frequency
  double rabi = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::optional<double> w_in;
  bool outside_validity = false;       // Omega < 3 Gamma1
};

/// S(dw) per unit angular frequency (W s/rad), the triplet formula verbatim.
double mollow_density_angular(const SensorParams& sensor, double rabi, double detuning);

/// Per cyclic frequency (W/Hz): 2 pi times the angular density, so the
/// integral over Hz equals hbar omega Gamma1 / 4.
double mollow_density(const SensorParams& sensor, double rabi, double detuning);

double side_peak_halfwidth(const SensorParams& sensor);     // (G1 + G2) / 2
double central_peak_halfwidth(const SensorParams& sensor);  // G2

/// hbar omega_a Gamma1 / 4, the exact integral of the triplet.
double mollow_total_power(const SensorParams& sensor);

/// Evaluates the triplet on an absolute frequency grid (Hz). Throws on an empty
/// or non-increasing grid.
Spectrum mollow_spectrum(const SensorParams& sensor, double rabi,
                         std::span<const double> frequencies_hz);

struct SpectrumIntegral {
  double total = 0.0;                // W, trapezoidal over Hz
  double truncation_fraction = 0.0;  // analytic Lorentzian mass outside the grid
  bool truncation_warning = false;   // truncation_fraction > 0.5 %
};

SpectrumIntegral integrate_spectrum(const Spectrum& spectrum);

}  // namespace qpower
