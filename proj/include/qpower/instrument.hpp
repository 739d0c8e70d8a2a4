#pragma once

// Virtual measurement chain. A generator power W_in reaches the sensor as
// W0 = W_in * 10^(A/10) (A < 0 is the input-line attenuation), so the on-chip
// drive obeys Omega^2 = k W_in with a sensor-dependent k. Ideal model outputs
// are then distorted by a slow gain drift, optional coherent leakage and
// Gaussian noise drawn from a seeded, per-series random stream.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qpower/series.hpp"
#include "qpower/units.hpp"

namespace qpower {

struct ChainConfig {
  double attenuation_db = -100.0;  // input line, generator -> sensor
  double gain_db = 48.0;           // output line, sensor -> detector
  double noise_sigma = 0.0;        // relative amplitude noise per point
  double drift_db = 0.0;           // amplitude of the slow gain drift, power dB
  double drift_cycles = 0.5;       // drift periods across one acquisition campaign
  double leakage_amp = 0.0;        // coherent offset, reflection and Rabi only
  std::uint64_t seed = 0;
  /// Extra input attenuation of each method's room-temperature setup (dB, <= 0 adds loss).
  std::array<double, 4> setup_offset_db{};
  /// Explicit Omega^2 / W_in; overrides the attenuation-derived value when set.
  std::optional<double> k_atten;

  double setup_offset(Method m) const { return setup_offset_db[static_cast<std::size_t>(m)]; }
  double method_attenuation_db(Method m) const { return attenuation_db + setup_offset(m); }

  /// k such that Omega^2 = k W_in reproduces the method's line attenuation for this sensor.
  double k_for(const SensorParams& sensor, Method m) const;

  /// Drift in power dB at acquisition fraction u in [0, 1).
  double drift_at(double u) const;
};

/// Omega = sqrt(k W_in).
double chain_rabi(double w_in, double k);

struct SimulationGrids {
  std::vector<double> characterization_offsets_hz;  // relative to the sensor frequency
  double characterization_w_in = 1e-8;              // W
  std::vector<double> reflection_offsets_hz;
  std::vector<double> pulse_lengths_s;
  std::vector<double> mollow_offsets_hz;
  std::vector<double> mixing_delta_d_hz;
};

/// Where a block of series sits in the campaign's acquisition order.
struct AcquisitionSlot {
  std::size_t first_index = 0;
  std::size_t total_series = 1;
};

/// One series per W_in for a single sensor. Throws std::invalid_argument if the
/// grid the method needs is empty.
std::vector<MeasurementSeries> generate_dataset(Method method, const SensorParams& sensor,
                                                const ChainConfig& chain,
                                                std::span<const double> w_in_list,
                                                const SimulationGrids& grids,
                                                AcquisitionSlot slot = {});

/// Weak-drive reflection lineshape taken through the reflection setup.
MeasurementSeries characterization_series(const SensorParams& sensor, const ChainConfig& chain,
                                          const SimulationGrids& grids,
                                          AcquisitionSlot slot = {});

struct Campaign {
  std::vector<MeasurementSeries> characterization;  // one per sensor
  std::vector<MeasurementSeries> series;            // sensor-major, then W_in
};

/// Full acquisition: every sensor is tuned to the drive frequency, then
/// characterized and swept through w_in_list. Sensors are measured one after
/// the other, so the slow drift differs between them.
Campaign simulate_campaign(Method method, std::span<const SensorParams> sensors,
                           const ChainConfig& chain, std::span<const double> w_in_list,
                           const SimulationGrids& grids, double omega_drive);

}  // namespace qpower
