#pragma once

// Physical constants, unit conversions and the shared sensor/drive value types.
//
// Every rate and frequency held inside the library is angular (rad/s). Cyclic
// Hz, dBm and mW only appear at I/O surfaces (CSV, config, reports).

#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace qpower {

inline constexpr double kHbar = 1.054571817e-34;  // J s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

constexpr double hz_to_angular(double f_hz) { return kTwoPi * f_hz; }
constexpr double angular_to_hz(double omega) { return omega / kTwoPi; }

/// Watts to dBm. Throws DomainError for non-positive power.
double watts_to_dbm(double watts);
double dbm_to_watts(double dbm);

/// Power ratio <-> decibels.
double ratio_to_db(double ratio);
double db_to_ratio(double db);

struct LineConstants {
  double impedance = 50.0;  // ohm
  static constexpr double hbar = kHbar;

  explicit LineConstants(double z = 50.0);
};

/// One two-level sensor. gamma2 is the total dephasing rate, so a physical
/// sensor has gamma2 >= gamma1 / 2.
class SensorParams {
 public:
  SensorParams(std::string label, double omega_a, double gamma1, double gamma2,
               std::optional<double> coupling_capacitance = std::nullopt);

  const std::string& label() const { return label_; }
  double omega_a() const { return omega_a_; }
  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  std::optional<double> coupling_capacitance() const { return coupling_capacitance_; }

  /// Gamma2 / Gamma1; 1/2 without pure dephasing.
  double chi() const { return gamma2_ / gamma1_; }
  double pure_dephasing() const { return gamma2_ - 0.5 * gamma1_; }

  /// Dipole moment implied by radiative relaxation into a line of impedance Z.
  double dipole_moment(const LineConstants& line = LineConstants{}) const;

  /// Same device flux-tuned to a new transition frequency, rates unchanged.
  SensorParams tuned_to(double omega_a) const;
  SensorParams with_rates(double gamma1, double gamma2) const;

 private:
  std::string label_;
  double omega_a_;
  double gamma1_;
  double gamma2_;
  std::optional<double> coupling_capacitance_;
};

/// Single coherent tone in the frame rotating at the drive frequency.
struct DriveConfig {
  double omega = 0.0;  // drive angular frequency
  double rabi = 0.0;   // Rabi frequency Omega

  DriveConfig(double omega, double rabi);

  double detuning(const SensorParams& sensor) const { return omega - sensor.omega_a(); }

  static DriveConfig resonant(const SensorParams& sensor, double rabi);
  static DriveConfig detuned(const SensorParams& sensor, double rabi, double detuning);
};

/// Two close-spaced tones at omega_0' +/- half_spacing, omega_0' = omega_a + central_detuning.
struct TwoToneDrive {
  double rabi_plus = 0.0;
  double rabi_minus = 0.0;
  double half_spacing = 0.0;
  double central_detuning = 0.0;

  TwoToneDrive(double rabi_plus, double rabi_minus, double half_spacing,
               double central_detuning);
};

}  // namespace qpower
