#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qpower/bloch.hpp"
#include "qpower/scattering.hpp"

using namespace qpower;
using doctest::Approx;

namespace {

const SensorParams kB("B", hz_to_angular(7.48e9), hz_to_angular(7.8e6), hz_to_angular(6.2e6));

double distance(const DensityState& a, const DensityState& b) {
  return std::max(std::abs(a.rho11 - b.rho11), std::abs(a.rho10 - b.rho10));
}

struct GridPoint {
  double rabi_over_g1, detuning_over_g2, chi;
};

std::vector<GridPoint> grid10() {
  std::vector<GridPoint> out;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 10; ++k)
        out.push_back({0.01 * std::pow(2000.0, i / 9.0), -5.0 + 10.0 * j / 9.0, 0.5 + 2.5 * k / 9.0});
  return out;
}

}  // namespace

TEST_CASE("steady state of an undriven sensor is the ground state") {
  for (double dw : {-1e8, 0.0, 3e7}) {
    const auto s = steady_state(kB, DriveConfig::detuned(kB, 0.0, dw));
    CHECK(s.rho11 == 0.0);
    CHECK(s.rho10 == std::complex<double>(0.0, 0.0));
  }
}

TEST_CASE("weak-drive scattered amplitude approaches G1/(2 G2)") {
  const double rabi = 1e-4 * kB.gamma1();
  const auto s = steady_state(kB, DriveConfig::resonant(kB, rabi));
  const auto r = std::complex<double>(0.0, -1.0) * kB.gamma1() * s.rho10 / rabi;
  CHECK(r.real() == Approx(0.6290).epsilon(1e-4));
  CHECK(std::abs(r.imag()) < 1e-12);

  const oracle::Lindblad lb{kB.gamma1(), kB.gamma2(), 0.0, rabi};
  const auto rho = lb.steady_state();
  CHECK(std::abs(rho(1, 0) - s.rho10) < 1e-12);
}

TEST_CASE("saturation drives the population to one half") {
  const auto s = steady_state(kB, DriveConfig::resonant(kB, 1e4 * kB.gamma1()));
  CHECK(s.rho11 == Approx(0.5).epsilon(1e-6));
}

TEST_CASE("steady state agrees with the density-matrix Liouvillian") {
  for (const auto& g : grid10()) {
    const double g1 = 1e7;
    const SensorParams s("x", 1e10, g1, g.chi * g1);
    const double rabi = g.rabi_over_g1 * g1, dw = g.detuning_over_g2 * s.gamma2();
    const auto ours = steady_state(s, DriveConfig::detuned(s, rabi, dw));
    const auto ref = oracle::Lindblad{g1, s.gamma2(), dw, rabi}.steady_state();
    CHECK(std::abs(ours.rho11 - ref(1, 1).real()) < 1e-12);
    CHECK(std::abs(ours.rho10 - ref(1, 0)) < 1e-12);
    CHECK(ours.is_physical());
  }
}

TEST_CASE("free decay from the excited state") {
  const auto d = DriveConfig::resonant(kB, 0.0);
  const auto traj = evolve(kB, d, DensityState::excited(), 3.0 / kB.gamma1(), 1e-10);
  REQUIRE(traj.times.size() == traj.states.size());
  for (std::size_t i = 0; i < traj.times.size(); i += 97) {
    CHECK(traj.states[i].rho11 == Approx(std::exp(-kB.gamma1() * traj.times[i])).epsilon(1e-9));
    CHECK(std::abs(traj.states[i].rho10) == 0.0);
  }
  CHECK(std::is_sorted(traj.times.begin(), traj.times.end()));
  CHECK(traj.times.back() == Approx(3.0 / kB.gamma1()));
}

TEST_CASE("driven transient contracts onto the steady state") {
  // resonant: the (rho11, v) block decays at (G1 + G2)/2
  const auto d = DriveConfig::resonant(kB, hz_to_angular(100e6));
  const auto ss = steady_state(kB, d);
  const double t10 = 10.0 / kB.gamma1();
  const auto at10 = propagate(kB, d, DensityState::ground(), t10, 1e-9);
  const double envelope = std::exp(-0.5 * (kB.gamma1() + kB.gamma2()) * t10);
  CHECK(distance(at10, ss) < envelope);
  const auto at30 = propagate(kB, d, DensityState::ground(), 30.0 / kB.gamma1(), 1e-9);
  CHECK(distance(at30, ss) < 1e-7);
}

TEST_CASE("integration converges to steady state over the property grid") {
  for (const auto& g : grid10()) {
    const double g1 = 1e7;
    const SensorParams s("x", 1e10, g1, g.chi * g1);
    const auto d = DriveConfig::detuned(s, g.rabi_over_g1 * g1, g.detuning_over_g2 * s.gamma2());
    const auto end = propagate(s, d, DensityState::ground(), 30.0 / g1, 1.0);
    CHECK(distance(end, steady_state(s, d)) < 1e-7);
  }
}

TEST_CASE("trajectory matches the density-matrix integrator and stays physical") {
  const oracle::Lindblad lb{kB.gamma1(), kB.gamma2(), 0.7 * kB.gamma2(), hz_to_angular(40e6)};
  const auto d = DriveConfig::detuned(kB, lb.rabi, lb.detuning);
  const double t_end = 2e-7;
  const auto traj = evolve(kB, d, DensityState::ground(), t_end, 1e-11);
  for (const auto& st : traj.states) CHECK(st.is_physical(1e-9));
  const auto ref = lb.evolve(oracle::ground(), t_end, 40000);
  CHECK(std::abs(traj.states.back().rho11 - ref(1, 1).real()) < 1e-9);
  CHECK(std::abs(traj.states.back().rho10 - ref(1, 0)) < 1e-9);
}

TEST_CASE("step size honours the fastest rate") {
  const auto d = DriveConfig::resonant(kB, 1e9);
  CHECK(max_step(kB, d, 1.0) <= 1.0 / (50.0 * 1e9) * (1 + 1e-15));
  CHECK(max_step(kB, d, 1e-12) == 1e-12);
  CHECK_THROWS_AS(evolve(kB, d, DensityState::ground(), 0.0, 1e-9), DomainError);
  CHECK_THROWS_AS(evolve(kB, d, DensityState::ground(), 1e-9, 0.0), DomainError);
}

TEST_CASE("undamped limit flops as sin^2") {
  const SensorParams tiny("t", 1e10, 1e-3, 1e-3);
  const double rabi = hz_to_angular(250e6);
  const auto d = DriveConfig::resonant(tiny, rabi);
  const auto traj = evolve(tiny, d, DensityState::ground(), 1e-8, 1e-11);
  for (std::size_t i = 0; i < traj.times.size(); i += 13) {
    const double expect = std::pow(std::sin(rabi * traj.times[i] / 2.0), 2);
    CHECK(std::abs(traj.states[i].rho11 - expect) < 1e-3);
  }
}

TEST_CASE("rabi trace") {
  std::vector<double> taus;
  for (int i = 0; i <= 1400; ++i) taus.push_back(1.5e-9 + i * 1e-11);
  SUBCASE("period of a 250 MHz drive is 4 ns") {
    // weakly damped sensor so the drive period and the observed period coincide
    const SensorParams s("s", hz_to_angular(7.48e9), hz_to_angular(1e6), hz_to_angular(1e6));
    const auto tr = rabi_trace(s, DriveConfig::resonant(s, hz_to_angular(250e6)), taus);
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
      if (tr.y[i].real() > tr.y[i - 1].real() && tr.y[i].real() >= tr.y[i + 1].real()) peaks.push_back(tr.x[i]);
    }
    REQUIRE(peaks.size() >= 3);
    const double period = (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
    CHECK(period == Approx(4.0e-9).epsilon(5e-3));
  }
  SUBCASE("no drive, no signal") {
    const auto tr = rabi_trace(kB, DriveConfig::resonant(kB, 0.0), taus);
    for (const auto& v : tr.y) CHECK(v == std::complex<double>(0.0, 0.0));
  }
  SUBCASE("records Im<sigma^-> at the end of each pulse, input order kept") {
    const std::vector<double> some{7e-9, 2e-9, 4.5e-9};
    const auto d = DriveConfig::resonant(kB, hz_to_angular(120e6));
    const auto tr = rabi_trace(kB, d, some);
    CHECK(tr.method == Method::rabi);
    for (std::size_t i = 0; i < some.size(); ++i) {
      CHECK(tr.x[i] == some[i]);
      const auto ref = oracle::Lindblad{kB.gamma1(), kB.gamma2(), 0.0, d.rabi}.evolve(oracle::ground(), some[i], 20000);
      CHECK(tr.y[i].real() == Approx(ref(1, 0).imag()).epsilon(1e-7));
    }
  }
  CHECK_THROWS(rabi_trace(kB, DriveConfig::resonant(kB, 1e9), std::vector<double>{}));
  CHECK_THROWS(rabi_trace(kB, DriveConfig::resonant(kB, 1e9), std::vector<double>{-1e-9}));
}
