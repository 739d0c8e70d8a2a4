#include <cmath>
#include <string>

#include "doctest.h"
#include "qpower/presets.hpp"

using namespace qpower;
using doctest::Approx;

TEST_CASE("catalog rows") {
  const auto b = load_preset("B");
  CHECK(b.label() == "B");
  CHECK(angular_to_hz(b.gamma1()) == Approx(7.8e6));
  CHECK(angular_to_hz(b.gamma2()) == Approx(6.2e6));
  CHECK(angular_to_hz(b.omega_a()) == Approx(kPresetFrequencyHz));
  CHECK(preset_entry("D").extinction == 0.94);
  CHECK(preset_entry("A").gamma1_err_mhz == 0.2);
  CHECK(preset_entry("C").gamma2_mhz == 10.4);
  CHECK(preset_catalog().size() == 4);
}

TEST_CASE("unknown preset lists the valid names") {
  CHECK_THROWS_AS(load_preset("X"), UnknownPreset);
  try {
    load_preset("X");
  } catch (const UnknownPreset& e) {
    const std::string msg = e.what();
    for (const char* n : {"A", "B", "C", "D"}) CHECK(msg.find(n) != std::string::npos);
  }
}

TEST_CASE("every preset is physical") {
  for (const auto& e : preset_catalog()) {
    CHECK(e.gamma2_mhz >= e.gamma1_mhz / 2.0);
    CHECK_NOTHROW(load_preset(e.name));
  }
}

TEST_CASE("predicted extinction") {
  CHECK(predicted_extinction(preset_entry("B")) == Approx(0.862).epsilon(1e-3));
  // A and B reproduce the quoted column within 1.5 points; C and D do not
  CHECK(std::abs(predicted_extinction(preset_entry("A")) - 0.92) < 0.015);
  CHECK(std::abs(predicted_extinction(preset_entry("B")) - 0.87) < 0.015);
  CHECK(predicted_extinction(preset_entry("C")) == Approx(0.955).epsilon(1e-3));
  CHECK(predicted_extinction(preset_entry("D")) == Approx(0.957).epsilon(1e-3));
}

TEST_CASE("scenarios") {
  CHECK(linspace(0.0, 1.0, 5)[1] == 0.25);
  CHECK(linspace(2.0, 3.0, 1).size() == 1);
  const auto r = default_scenario(Method::reflection);
  CHECK(r.powers_dbm.size() == 15);
  CHECK(r.powers_dbm.back() - r.powers_dbm.front() == Approx(25.0));
  CHECK(default_scenario(Method::rabi).grids.pulse_lengths_s.front() == Approx(1.5e-9));
  CHECK(default_scenario(Method::rabi).grids.pulse_lengths_s.back() == Approx(15.5e-9));
  for (Method m : kAllMethods) CHECK_FALSE(default_scenario(m).grids.characterization_offsets_hz.empty());
  const auto off = default_setup_offsets();
  CHECK(off[static_cast<int>(Method::rabi)] == -2.5);
  CHECK(off[static_cast<int>(Method::mixing)] == -3.0);
}
