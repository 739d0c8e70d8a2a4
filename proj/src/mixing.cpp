#include "qpower/mixing.hpp"

#include <cmath>

namespace qpower {

std::vector<MixingComponents> mixing_amplitudes(const SensorParams& sensor, double rabi,
                                                int p_max, double central_detuning,
                                                double v_plus, double v_minus) {
  if (p_max < 0) throw DomainError("mixing_amplitudes: p_max must be >= 0");
  if (!(rabi >= 0.0)) throw DomainError("mixing_amplitudes: rabi must be >= 0");

  const double g1 = sensor.gamma1();
  const double g2 = sensor.gamma2();
  const std::complex<double> lambda(g2, central_detuning);

  std::vector<MixingComponents> out;
  out.reserve(static_cast<std::size_t>(p_max) + 1);
  if (rabi == 0.0) {
    for (int p = 0; p <= p_max; ++p) out.push_back({p, {}, {}, 0.0, lambda, central_detuning});
    return out;
  }

  const double drive = 2.0 * g2 * rabi * rabi;
  const double b = g1 * std::norm(lambda) + drive;
  const double sin_theta = drive / b;
  // 1 - sin^2 = (1 - s)(1 + s) keeps cos accurate as theta -> pi/2
  const double cos_theta = std::sqrt((g1 * std::norm(lambda) / b) * (1.0 + sin_theta));
  const double theta = std::atan2(sin_theta, cos_theta);
  const double half_tan = sin_theta / (1.0 + cos_theta);

  // G1 tan(theta) / Lambda, simplified so it stays finite as Omega -> 0
  const std::complex<double> base = lambda * (g1 * g1 / (2.0 * b * cos_theta));

  double power = 1.0;  // tan^p(theta/2)
  for (int p = 0; p <= p_max; ++p) {
    const double sign = (p % 2 == 0) ? 1.0 : -1.0;
    const std::complex<double> pre = sign * power * base;
    MixingComponents c;
    c.order = p;
    c.v_plus = pre * (v_minus * half_tan - v_plus);
    c.v_minus = pre * (v_plus * half_tan - v_minus);
    c.theta = theta;
    c.lambda = lambda;
    c.central_detuning = central_detuning;
    out.push_back(c);
    power *= half_tan;
  }
  return out;
}

double at_ratio(const SensorParams& sensor, double rabi, double central_detuning) {
  const auto comps = mixing_amplitudes(sensor, rabi, 1, central_detuning);
  const std::complex<double> drive_line = 1.0 + comps[0].v_minus;
  return std::abs(comps[1].v_plus / drive_line);
}

MeasurementSeries at_splitting_trace(const SensorParams& sensor, double rabi,
                                     std::span<const double> central_detunings) {
  MeasurementSeries out;
  out.method = Method::mixing;
  out.x.reserve(central_detunings.size());
  out.y.reserve(central_detunings.size());
  for (double dd : central_detunings) {
    out.x.push_back(angular_to_hz(dd));
    out.y.emplace_back(at_ratio(sensor, rabi, dd), 0.0);
  }
  out.sigma.assign(out.x.size(), 0.0);
  return out;
}

AlphaSlice alpha_slice(const SensorParams& sensor, double rabi) {
  AlphaSlice s;
  s.alpha_m = at_ratio(sensor, rabi, 0.0);
  s.chi = sensor.chi();
  s.eta = (s.alpha_m > 0.0 && s.alpha_m < 0.1) ? eta_correction(s.chi, s.alpha_m) : 1.0;
  return s;
}

double eta_correction(double chi, double alpha_m) {
  if (chi < 0.5 * (1.0 - 1e-12)) throw DomainError("eta_correction: chi must be >= 1/2");
  if (!(alpha_m > 0.0) || alpha_m >= 0.1) {
    throw DomainError("eta_correction: alpha_m must lie in (0, 0.1) for the series to hold");
  }
  return 1.0 - 3.0 * std::sqrt(chi * alpha_m) + (1.0 - 0.5 * chi) * alpha_m;
}

double photon_rate_from_slice(const SensorParams& sensor, double v_drive, double v_side3,
                              bool apply_eta) {
  if (!(v_side3 > 0.0)) {
    throw DomainError("photon_rate_from_slice: side component is zero (below noise floor?)");
  }
  const double nu1 = sensor.gamma1() / 8.0 * (v_drive / v_side3);
  if (!apply_eta) return nu1;
  return nu1 * eta_correction(sensor.chi(), v_side3 / v_drive);
}

}  // namespace qpower
