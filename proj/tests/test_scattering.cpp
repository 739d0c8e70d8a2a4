#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "qpower/bloch.hpp"
#include "qpower/scattering.hpp"

using namespace qpower;
using doctest::Approx;

namespace {
const double kOmega = hz_to_angular(7.48e9);
const SensorParams kB("B", kOmega, hz_to_angular(7.8e6), hz_to_angular(6.2e6));
}  // namespace

TEST_CASE("reflection examples") {
  CHECK(reflection(kB, 1e-6 * kB.gamma1(), 0.0).real() == Approx(0.6290).epsilon(1e-4));
  CHECK(max_reflection(kB) == Approx(7.8 / 12.4));
  const double rabi = std::sqrt(kB.gamma1() * kB.gamma2());
  CHECK(reflection(kB, rabi, 0.0).real() == Approx(kB.gamma1() / (4.0 * kB.gamma2())).epsilon(1e-14));
  CHECK(extinction(kB) == Approx(0.862).epsilon(1e-3));
}

TEST_CASE("reflection equals the steady-state scattered amplitude") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 2000; ++n) {
    const double g1 = 1e7;
    const SensorParams s("x", 1e10, g1, g1 * (0.5 + 2.5 * u(rng)));
    const double rabi = g1 * 0.01 * std::pow(2000.0, u(rng));
    const double dw = s.gamma2() * (-5.0 + 10.0 * u(rng));
    const auto ss = steady_state(s, DriveConfig::detuned(s, rabi, dw));
    const auto r_bloch = std::complex<double>(0.0, -1.0) * g1 * ss.rho10 / rabi;
    const auto r = reflection(s, rabi, dw);
    CHECK(std::abs(r - r_bloch) <= 1e-9 * std::abs(r));
    CHECK(std::abs(r - oracle::reflection(g1, s.gamma2(), dw, rabi)) <= 1e-14 * std::abs(r));
  }
}

TEST_CASE("reflection point, symmetry and sign") {
  for (double dw : {1e6, 3e7, 2e8}) {
    const auto p = reflection_point(kB, 1e7, dw);
    CHECK(p.t == 1.0 - p.r);
    CHECK(std::abs(p.t) <= 1.0 + 1e-12);
    CHECK(p.r.real() > 0.0);
    CHECK(p.r.imag() > 0.0);
    const auto m = reflection(kB, 1e7, -dw);
    CHECK(m.real() == p.r.real());
    CHECK(m.imag() == -p.r.imag());
  }
  double best = -1.0, at = 1.0;
  for (int i = -200; i <= 200; ++i) {
    const double dw = i * 1e6;
    if (reflection(kB, 1e5, dw).real() > best) best = reflection(kB, 1e5, dw).real(), at = dw;
  }
  CHECK(at == 0.0);
  CHECK_THROWS_AS(reflection(kB, -1.0, 0.0), DomainError);
}

TEST_CASE("power from reflection") {
  CHECK(power_from_reflection(max_reflection(kB), kB) == Approx(0.0).scale(1e-20));
  // Re r = 0.3 => (G1/1.2 - G2/2) hbar omega
  const double expect = (kB.gamma1() / 1.2 - kB.gamma2() / 2.0) * kHbar * kOmega;
  CHECK(power_from_reflection(0.3, kB) == Approx(expect).epsilon(1e-12));
  CHECK(expect == Approx(1.0588e-16).epsilon(1e-4));
  CHECK(power_from_reflection(1e-9, kB) > power_from_reflection(1e-3, kB));
  CHECK_THROWS_AS(power_from_reflection(0.0, kB), DomainError);
  CHECK_THROWS_AS(power_from_reflection(0.7, kB), DomainError);

  // algebraic round trip through the resonant reflection
  for (double rabi : {1e5, 1e7, 5e7, 3e8}) {
    const double r = reflection(kB, rabi, 0.0).real();
    CHECK(power_from_reflection(r, kB) ==
          Approx(rabi * rabi * kHbar * kOmega / (2.0 * kB.gamma1())).epsilon(1e-10));
  }
}

TEST_CASE("photon rate and absolute power") {
  const double rabi = hz_to_angular(50e6);
  CHECK(photon_rate(0.0, kB.gamma1()) == 0.0);
  CHECK(photon_rate(rabi, kB.gamma1()) == Approx(1.00692e9).epsilon(1e-5));
  CHECK(absolute_power(rabi, kB.gamma1(), kOmega) == Approx(4.99e-15).epsilon(1e-3));
  CHECK(watts_to_dbm(absolute_power(rabi, kB.gamma1(), kOmega)) == Approx(-113.0).epsilon(1e-3));
  CHECK(photon_rate(2 * rabi, kB.gamma1()) == Approx(4 * photon_rate(rabi, kB.gamma1())));

  const double mu = mu_from_gamma1(kB.gamma1(), kOmega, 50.0);
  CHECK(photon_rate(rabi, kB.gamma1()) ==
        Approx(oracle::photon_rate_via_voltage(rabi, mu, kOmega, 50.0)).epsilon(1e-12));
  const double w0 = absolute_power(rabi, kB.gamma1(), kOmega);
  CHECK(rabi_from_power(w0, kB.gamma1(), kOmega) == Approx(rabi).epsilon(1e-14));
  CHECK_THROWS_AS(photon_rate(1.0, 0.0), DomainError);
}

TEST_CASE("dipole relations") {
  const double mu = mu_from_gamma1(kB.gamma1(), kOmega, 50.0);
  CHECK(mu == Approx(4.69e-20).epsilon(2e-3));
  CHECK(gamma1_dipole(2 * mu, kOmega, 50.0) == Approx(4 * kB.gamma1()).epsilon(1e-14));
  CHECK(std::abs(mu_from_gamma1(gamma1_dipole(mu, kOmega, 50.0), kOmega, 50.0) - mu) / mu < 1e-12);
  CHECK(kB.dipole_moment() == Approx(mu));
  CHECK_THROWS_AS(mu_from_gamma1(-1.0, kOmega, 50.0), DomainError);
}

TEST_CASE("detuned reflection ratio") {
  CHECK(detuned_reflection_ratio(kOmega, 5e-15, 50.0) == Approx(3.4513e-5).epsilon(1e-4));
  CHECK(detuned_reflection_ratio(kOmega, 0.0, 50.0) == 0.0);
  CHECK(detuned_reflection_ratio(kOmega, 3e-15, 50.0) == Approx(1.2425e-5).epsilon(1e-4));
}
