#pragma once

// Reference sensors A-D and the default measurement scenario for each method.

#include <array>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "qpower/instrument.hpp"
#include "qpower/series.hpp"
#include "qpower/units.hpp"

namespace qpower {

/// Frequency at which the catalog rates were measured, and the benchmark
/// frequency the scenarios tune every sensor to.
inline constexpr double kPresetFrequencyHz = 7.46e9;
inline constexpr double kBenchmarkFrequencyHz = 7.48e9;

struct PresetEntry {
  std::string_view name;
  double omega0_ghz;        // transition frequency at the flux degeneracy point
  double extinction;        // quoted weak-drive power extinction
  double gamma1_mhz;        // Gamma1 / 2pi
  double gamma1_err_mhz;
  double gamma2_mhz;        // Gamma2 / 2pi
  double gamma2_err_mhz;
};

class UnknownPreset : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::span<const PresetEntry> preset_catalog();

/// Throws UnknownPreset listing the valid names.
const PresetEntry& preset_entry(std::string_view name);

/// Sensor at kPresetFrequencyHz with the catalog rates.
SensorParams load_preset(std::string_view name);

/// Weak-drive extinction 1 - |1 - G1/(2 G2)|^2 implied by the catalog rates.
double predicted_extinction(const PresetEntry& entry);

/// Default acquisition plan of one method.
struct Scenario {
  std::vector<double> powers_dbm;  // generator powers
  SimulationGrids grids;
};

/// n points from a to b inclusive.
std::vector<double> linspace(double a, double b, std::size_t n);

Scenario default_scenario(Method method);

/// Setup offsets (dB) of the reference chain: the Rabi setup passes through
/// mixers and the mixing setup through a power combiner.
std::array<double, 4> default_setup_offsets();

}  // namespace qpower
