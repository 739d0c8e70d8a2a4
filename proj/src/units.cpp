#include "qpower/units.hpp"

#include <cmath>
#include <utility>

namespace qpower {

double watts_to_dbm(double watts) {
  if (!(watts > 0.0) || !std::isfinite(watts)) {
    throw DomainError("watts_to_dbm: power must be positive and finite");
  }
  return 10.0 * std::log10(watts / 1e-3);
}

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double ratio_to_db(double ratio) {
  if (!(ratio > 0.0)) throw DomainError("ratio_to_db: ratio must be positive");
  return 10.0 * std::log10(ratio);
}

double db_to_ratio(double db) { return std::pow(10.0, db / 10.0); }

LineConstants::LineConstants(double z) : impedance(z) {
  if (!(z > 0.0)) throw DomainError("line impedance must be positive");
}

SensorParams::SensorParams(std::string label, double omega_a, double gamma1, double gamma2,
                           std::optional<double> coupling_capacitance)
    : label_(std::move(label)),
      omega_a_(omega_a),
      gamma1_(gamma1),
      gamma2_(gamma2),
      coupling_capacitance_(coupling_capacitance) {
  if (!(omega_a_ > 0.0) || !std::isfinite(omega_a_)) {
    throw DomainError("sensor '" + label_ + "': omega_a must be positive");
  }
  if (!(gamma1_ > 0.0) || !std::isfinite(gamma1_)) {
    throw DomainError("sensor '" + label_ + "': gamma1 must be positive");
  }
  // tiny slack so gamma2 == gamma1/2 survives a Hz -> rad/s round trip
  if (!std::isfinite(gamma2_) || gamma2_ < 0.5 * gamma1_ * (1.0 - 1e-12)) {
    throw DomainError("sensor '" + label_ + "': gamma2 must be >= gamma1/2");
  }
  if (coupling_capacitance_ && *coupling_capacitance_ < 0.0) {
    throw DomainError("sensor '" + label_ + "': coupling capacitance must be non-negative");
  }
}

double SensorParams::dipole_moment(const LineConstants& line) const {
  return std::sqrt(kHbar * gamma1_ / (omega_a_ * line.impedance));
}

SensorParams SensorParams::tuned_to(double omega_a) const {
  return SensorParams(label_, omega_a, gamma1_, gamma2_, coupling_capacitance_);
}

SensorParams SensorParams::with_rates(double gamma1, double gamma2) const {
  return SensorParams(label_, omega_a_, gamma1, gamma2, coupling_capacitance_);
}

DriveConfig::DriveConfig(double omega_, double rabi_) : omega(omega_), rabi(rabi_) {
  if (!(rabi >= 0.0) || !std::isfinite(rabi)) throw DomainError("rabi frequency must be >= 0");
}

DriveConfig DriveConfig::resonant(const SensorParams& sensor, double rabi) {
  return DriveConfig(sensor.omega_a(), rabi);
}

DriveConfig DriveConfig::detuned(const SensorParams& sensor, double rabi, double detuning) {
  return DriveConfig(sensor.omega_a() + detuning, rabi);
}

TwoToneDrive::TwoToneDrive(double plus, double minus, double spacing, double center)
    : rabi_plus(plus), rabi_minus(minus), half_spacing(spacing), central_detuning(center) {
  if (!(rabi_plus >= 0.0) || !(rabi_minus >= 0.0)) {
    throw DomainError("two-tone rabi amplitudes must be >= 0");
  }
  if (!(half_spacing > 0.0)) throw DomainError("two-tone half spacing must be > 0");
}

}  // namespace qpower
