#include "qpower/mollow.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qpower {
namespace {

double lorentz(double x, double width) { return width / (x * x + width * width); }

double outside_fraction(double lo, double hi, double center, double width) {
  const double inside = (std::atan((hi - center) / width) - std::atan((lo - center) / width)) /
                        std::numbers::pi;
  return 1.0 - inside;
}

}  // namespace

double side_peak_halfwidth(const SensorParams& sensor) {
  return 0.5 * (sensor.gamma1() + sensor.gamma2());
}

double central_peak_halfwidth(const SensorParams& sensor) { return sensor.gamma2(); }

double mollow_density(const SensorParams& sensor, double rabi, double detuning) {
  const double gs = side_peak_halfwidth(sensor);
  const double gc = central_peak_halfwidth(sensor);
  const double prefactor = kHbar * sensor.omega_a() * sensor.gamma1() / 8.0;
  return prefactor * (lorentz(detuning + rabi, gs) + 2.0 * lorentz(detuning, gc) +
                      lorentz(detuning - rabi, gs));
}

double mollow_density_angular(const SensorParams& sensor, double rabi, double detuning) {
  return mollow_density(sensor, rabi, detuning) / kTwoPi;
}

double mollow_total_power(const SensorParams& sensor) {
  return 0.25 * kHbar * sensor.omega_a() * sensor.gamma1();
}

Spectrum mollow_spectrum(const SensorParams& sensor, double rabi,
                         std::span<const double> frequencies_hz) {
  if (frequencies_hz.empty()) throw std::invalid_argument("mollow_spectrum: empty grid");
  for (std::size_t i = 1; i < frequencies_hz.size(); ++i) {
    if (!(frequencies_hz[i] > frequencies_hz[i - 1])) {
      throw std::invalid_argument("mollow_spectrum: grid must be strictly increasing");
    }
  }
  Spectrum s;
  s.frequencies_hz.assign(frequencies_hz.begin(), frequencies_hz.end());
  s.density.reserve(frequencies_hz.size());
  s.center_hz = angular_to_hz(sensor.omega_a());
  s.rabi = rabi;
  s.gamma1 = sensor.gamma1();
  s.gamma2 = sensor.gamma2();
  s.outside_validity = rabi < 3.0 * sensor.gamma1();
  for (double f : frequencies_hz) {
    s.density.push_back(mollow_density(sensor, rabi, hz_to_angular(f - s.center_hz)));
  }
  return s;
}

SpectrumIntegral integrate_spectrum(const Spectrum& spectrum) {
  const auto& f = spectrum.frequencies_hz;
  const auto& d = spectrum.density;
  if (f.size() < 2 || d.size() != f.size()) {
    throw std::invalid_argument("integrate_spectrum: need at least two grid points");
  }
  SpectrumIntegral out;
  for (std::size_t i = 1; i < f.size(); ++i) {
    out.total += 0.5 * (d[i] + d[i - 1]) * (f[i] - f[i - 1]);
  }

  if (spectrum.gamma1 > 0.0) {
    const double lo = hz_to_angular(f.front() - spectrum.center_hz);
    const double hi = hz_to_angular(f.back() - spectrum.center_hz);
    const double gs = 0.5 * (spectrum.gamma1 + spectrum.gamma2);
    const double gc = spectrum.gamma2;
    // weights of the three Lorentzians in the total: 1/4, 1/2, 1/4
    out.truncation_fraction = 0.25 * outside_fraction(lo, hi, -spectrum.rabi, gs) +
                              0.5 * outside_fraction(lo, hi, 0.0, gc) +
                              0.25 * outside_fraction(lo, hi, spectrum.rabi, gs);
    out.truncation_warning = out.truncation_fraction > 0.005;
  }
  return out;
}

}  // namespace qpower
