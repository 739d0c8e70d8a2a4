#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qpower/mollow.hpp"
#include "qpower/presets.hpp"

using namespace qpower;
using doctest::Approx;

namespace {

const SensorParams kB("B", hz_to_angular(7.48e9), hz_to_angular(7.8e6), hz_to_angular(6.2e6));

std::vector<double> grid_around(const SensorParams& s, double half_width_hz, std::size_t n) {
  return linspace(angular_to_hz(s.omega_a()) - half_width_hz, angular_to_hz(s.omega_a()) + half_width_hz, n);
}

}  // namespace

TEST_CASE("triplet shape") {
  CHECK(angular_to_hz(side_peak_halfwidth(kB)) == Approx(7.0e6).epsilon(1e-14));
  CHECK(central_peak_halfwidth(kB) == kB.gamma2());

  const double rabi = hz_to_angular(80e6);
  const double pref = kHbar * kB.omega_a() * kB.gamma1() / 8.0 / kTwoPi;
  // central term alone at zero detuning
  const double side = 2.0 * side_peak_halfwidth(kB) / (rabi * rabi + std::pow(side_peak_halfwidth(kB), 2));
  CHECK(mollow_density_angular(kB, rabi, 0.0) == Approx(pref * (2.0 / kB.gamma2() + side)).epsilon(1e-13));
  CHECK(mollow_density(kB, rabi, 1e7) == Approx(kTwoPi * mollow_density_angular(kB, rabi, 1e7)));

  for (double dw : {0.0, 1e6, 3e7, 5e8, 4e9}) {
    CHECK(mollow_density(kB, rabi, dw) == mollow_density(kB, rabi, -dw));
    CHECK(mollow_density(kB, rabi, dw) >= 0.0);
  }
}

TEST_CASE("side terms peak at +-Omega") {
  const double rabi = 40.0 * kB.gamma1();
  // beyond the central peak's reach the triplet is maximal at the side centre
  double best = 0.0, at = 0.0;
  for (int i = -2000; i <= 2000; ++i) {
    const double dw = rabi + i * rabi * 1e-5;
    const double v = mollow_density(kB, rabi, dw);
    if (v > best) best = v, at = dw;
  }
  CHECK(std::abs(at - rabi) / rabi < 2e-4);
}

TEST_CASE("total power") {
  const double total = mollow_total_power(kB);
  CHECK(total == Approx(kHbar * kB.omega_a() * kB.gamma1() / 4.0));
  CHECK(total == Approx(6.0726e-17).epsilon(1e-4));
  CHECK(mollow_total_power(kB.with_rates(2 * kB.gamma1(), 2 * kB.gamma2())) == Approx(2 * total));
}

TEST_CASE("numeric integral on +-20 Omega") {
  const double rabi = 10.0 * kB.gamma1();
  const double half = 20.0 * angular_to_hz(rabi);
  const auto spec = mollow_spectrum(kB, rabi, grid_around(kB, half, 20001));
  CHECK_FALSE(spec.outside_validity);
  const auto in = integrate_spectrum(spec);
  CHECK(std::abs(in.total / mollow_total_power(kB) - 1.0) < 0.01);
  // trapezoid against the exact windowed integral
  const double window = oracle::mollow_integral(kB.gamma1(), kB.gamma2(), kB.omega_a(), rabi,
                                                -hz_to_angular(half), hz_to_angular(half));
  CHECK(in.total == Approx(window).epsilon(1e-4));
  CHECK(in.truncation_fraction == Approx(1.0 - window / mollow_total_power(kB)).epsilon(1e-6));
  CHECK_FALSE(in.truncation_warning);
}

TEST_CASE("truncation and validity flags") {
  const double rabi = 2.0 * kB.gamma1();
  const auto spec = mollow_spectrum(kB, rabi, grid_around(kB, 2.0 * angular_to_hz(rabi), 401));
  CHECK(spec.outside_validity);
  CHECK(integrate_spectrum(spec).truncation_warning);
  CHECK_THROWS(mollow_spectrum(kB, rabi, std::vector<double>{}));
  CHECK_THROWS(mollow_spectrum(kB, rabi, std::vector<double>{2.0, 1.0}));
}

TEST_CASE("side peak separation approaches 2 Omega") {
  const double gs = side_peak_halfwidth(kB);
  const double rabi = 10.0 * gs;
  double best = 0.0, at = 0.0;
  // side peak only; the central line is taller
  for (int i = 0; i <= 400000; ++i) {
    const double dw = (0.5 + i * 1e-5 * 2.5) * rabi;
    const double v = mollow_density(kB, rabi, dw);
    if (v > best) best = v, at = dw;
  }
  CHECK(std::abs(2.0 * at - 2.0 * rabi) / (2.0 * rabi) < 0.01);
}
