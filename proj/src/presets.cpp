#include "qpower/presets.hpp"

#include <string>

#include "qpower/scattering.hpp"

namespace qpower {
namespace {

constexpr std::array<PresetEntry, 4> kCatalog{{
    {"A", 6.83, 0.92, 8.2, 0.2, 5.7, 0.1},
    {"B", 6.19, 0.87, 7.8, 0.2, 6.2, 0.1},
    {"C", 6.63, 0.93, 16.4, 0.4, 10.4, 0.2},
    {"D", 7.46, 0.94, 18.4, 0.3, 11.6, 0.1},
}};

}  // namespace

std::span<const PresetEntry> preset_catalog() { return kCatalog; }

const PresetEntry& preset_entry(std::string_view name) {
  for (const auto& e : kCatalog) {
    if (e.name == name) return e;
  }
  throw UnknownPreset("unknown sensor preset '" + std::string(name) + "' (valid: A, B, C, D)");
}

SensorParams load_preset(std::string_view name) {
  const auto& e = preset_entry(name);
  return SensorParams(std::string(e.name), hz_to_angular(kPresetFrequencyHz),
                      hz_to_angular(e.gamma1_mhz * 1e6), hz_to_angular(e.gamma2_mhz * 1e6));
}

double predicted_extinction(const PresetEntry& entry) {
  return extinction(load_preset(entry.name));
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {a};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = b;
  return out;
}

Scenario default_scenario(Method method) {
  Scenario s;
  s.grids.characterization_offsets_hz = linspace(-60e6, 60e6, 241);
  s.grids.characterization_w_in = dbm_to_watts(-50.0);
  switch (method) {
    case Method::reflection:
      s.powers_dbm = linspace(-45.0, -20.0, 15);
      s.grids.reflection_offsets_hz = linspace(-60e6, 60e6, 241);
      break;
    case Method::rabi:
      s.powers_dbm = linspace(-2.0, 8.0, 8);
      s.grids.pulse_lengths_s = linspace(1.5e-9, 15.5e-9, 141);
      break;
    case Method::mollow:
      s.powers_dbm = linspace(-10.0, 5.0, 8);
      s.grids.mollow_offsets_hz = linspace(-1.2e9, 1.2e9, 961);
      break;
    case Method::mixing:
      s.powers_dbm = linspace(-20.0, 0.0, 8);
      s.grids.mixing_delta_d_hz = linspace(-500e6, 500e6, 501);
      break;
  }
  return s;
}

std::array<double, 4> default_setup_offsets() { return {0.0, -2.5, 0.0, -3.0}; }

}  // namespace qpower
