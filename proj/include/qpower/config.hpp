#pragma once

// Run configuration: a flat `key = value` file with [section] headers.
//
//   [run]             seed, method, drive_frequency_ghz
//   [chain]           attenuation_db, gain_db, noise_sigma, drift_db, drift_cycles,
//                     leakage, k_atten, offset_<method>_db
//   [sensor.<label>]  preset and/or frequency_ghz, gamma1_mhz, gamma2_mhz
//   [characterization] power_dbm, span_mhz, points
//   [reflection] [mollow] [mixing]   powers_dbm, span_mhz, points (mixing: mode = at|slice)
//   [rabi]            powers_dbm, pulse_start_ns, pulse_stop_ns, points
//   [calibration]     fit_offset, normalization_rel
//
// Lists are comma separated; `a:b:n` is n evenly spaced values from a to b.
// Unknown sections or keys, duplicates and out-of-range values are errors.

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qpower/calibration.hpp"
#include "qpower/instrument.hpp"
#include "qpower/series.hpp"
#include "qpower/units.hpp"

namespace qpower {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<SensorParams> sensors;  // at the preset/explicit frequency
  ChainConfig chain;
  SimulationGrids grids;
  std::array<std::vector<double>, 4> powers_w;  // generator powers per method
  std::optional<Method> method;
  double drive_frequency_hz = 7.48e9;
  bool mixing_slice = false;
  bool fit_offset = false;
  std::optional<double> normalization_rel;
  std::string text;  // source bytes, hashed for provenance

  const std::vector<double>& powers(Method m) const { return powers_w[static_cast<std::size_t>(m)]; }
  double drive_omega() const { return hz_to_angular(drive_frequency_hz); }
  std::vector<SensorParams> tuned_sensors() const;
  /// Pipeline settings for a method; the normalization uncertainty defaults
  /// to the chain's drift amplitude.
  PipelineOptions pipeline_options(Method m) const;
};

/// Parses config text. Error messages start with "<source>:<line>: ".
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");

/// Reads and parses a file; I/O failures throw std::ios_base::failure.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace qpower
