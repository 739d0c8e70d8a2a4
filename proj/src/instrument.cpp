#include "qpower/instrument.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>

#include "qpower/bloch.hpp"
#include "qpower/mixing.hpp"
#include "qpower/mollow.hpp"
#include "qpower/scattering.hpp"

namespace qpower {
namespace {

constexpr std::uint32_t kNoiseTag = 0x6e6f6973;  // per-series noise streams
constexpr std::uint32_t kDriftTag = 0x64726674;  // drift phase

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    tag};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class SeriesNoise {
 public:
  SeriesNoise(const ChainConfig& chain, std::size_t index)
      : rng_(make_stream(chain.seed, index, kNoiseTag)) {}

  double normal() { return dist_(rng_); }

 private:
  std::mt19937_64 rng_;
  boost::random::normal_distribution<double> dist_{0.0, 1.0};
};

double drift_phase(const ChainConfig& chain) {
  auto rng = make_stream(chain.seed, 0, kDriftTag);
  return kTwoPi * uniform01(rng);
}

// Acquisition fraction of point i in series `index`.
double acquisition_fraction(AcquisitionSlot slot, std::size_t index, std::size_t i,
                            std::size_t n) {
  const double within = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
  return (static_cast<double>(index) + within) / static_cast<double>(slot.total_series);
}

struct Distortion {
  const ChainConfig& chain;
  double phase;

  double drift_db(double u) const {
    if (chain.drift_db == 0.0) return 0.0;
    return chain.drift_db * std::sin(kTwoPi * chain.drift_cycles * u + phase);
  }
  double amplitude_factor(double u) const { return std::pow(10.0, drift_db(u) / 20.0); }
  double power_factor(double u) const { return std::pow(10.0, drift_db(u) / 10.0); }
};

std::vector<double> absolute_grid(double center_hz, std::span<const double> offsets) {
  std::vector<double> out;
  out.reserve(offsets.size());
  for (double d : offsets) out.push_back(center_hz + d);
  return out;
}

void require_grid(std::span<const double> grid, const char* what) {
  if (grid.empty()) throw std::invalid_argument(std::string("simulation grid is empty: ") + what);
}

MeasurementSeries reflection_series(const SensorParams& sensor, double rabi,
                                    std::span<const double> offsets_hz, const Distortion& dist,
                                    AcquisitionSlot slot, std::size_t index) {
  const double center = angular_to_hz(sensor.omega_a());
  MeasurementSeries s;
  s.method = Method::reflection;
  s.x = absolute_grid(center, offsets_hz);
  SeriesNoise noise(dist.chain, index);
  const double sig = dist.chain.noise_sigma;
  const std::size_t n = s.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = acquisition_fraction(slot, index, i, n);
    std::complex<double> y =
        reflection(sensor, rabi, hz_to_angular(offsets_hz[i])) * dist.amplitude_factor(u);
    y += dist.chain.leakage_amp;
    const double sd = sig * std::abs(y);
    if (sig > 0.0) {
      const double re = noise.normal();
      const double im = noise.normal();
      y += std::complex<double>(sd * re, sd * im);
    }
    s.y.push_back(y);
    s.sigma.push_back(sd);
  }
  return s;
}

}  // namespace

double ChainConfig::k_for(const SensorParams& sensor, Method m) const {
  if (k_atten) return *k_atten;
  // Omega^2 = 2 G1 W0 / (hbar omega), W0 = W_in 10^(A/10)
  return 2.0 * sensor.gamma1() * db_to_ratio(method_attenuation_db(m)) /
         (kHbar * sensor.omega_a());
}

double ChainConfig::drift_at(double u) const {
  return Distortion{*this, drift_phase(*this)}.drift_db(u);
}

double chain_rabi(double w_in, double k) {
  if (!(w_in >= 0.0)) throw DomainError("chain_rabi: W_in must be >= 0");
  if (!(k > 0.0)) throw DomainError("chain_rabi: k must be > 0");
  return std::sqrt(k * w_in);
}

MeasurementSeries characterization_series(const SensorParams& sensor, const ChainConfig& chain,
                                          const SimulationGrids& grids, AcquisitionSlot slot) {
  require_grid(grids.characterization_offsets_hz, "characterization");
  const Distortion dist{chain, drift_phase(chain)};
  const double rabi =
      chain_rabi(grids.characterization_w_in, chain.k_for(sensor, Method::reflection));
  auto s = reflection_series(sensor, rabi, grids.characterization_offsets_hz, dist, slot,
                             slot.first_index);
  s.meta.sensor = sensor.label();
  s.meta.w_in = grids.characterization_w_in;
  s.meta.index = slot.first_index;
  s.meta.characterization = true;
  return s;
}

std::vector<MeasurementSeries> generate_dataset(Method method, const SensorParams& sensor,
                                                const ChainConfig& chain,
                                                std::span<const double> w_in_list,
                                                const SimulationGrids& grids,
                                                AcquisitionSlot slot) {
  switch (method) {
    case Method::reflection: require_grid(grids.reflection_offsets_hz, "reflection"); break;
    case Method::rabi: require_grid(grids.pulse_lengths_s, "rabi"); break;
    case Method::mollow: require_grid(grids.mollow_offsets_hz, "mollow"); break;
    case Method::mixing: require_grid(grids.mixing_delta_d_hz, "mixing"); break;
  }

  const Distortion dist{chain, drift_phase(chain)};
  const double k = chain.k_for(sensor, method);
  const double gain = db_to_ratio(chain.gain_db);
  const double sig = chain.noise_sigma;

  std::vector<MeasurementSeries> out;
  out.reserve(w_in_list.size());
  for (std::size_t j = 0; j < w_in_list.size(); ++j) {
    const std::size_t index = slot.first_index + j;
    const double w_in = w_in_list[j];
    const double rabi = chain_rabi(w_in, k);
    MeasurementSeries s;
    SeriesNoise noise(chain, index);

    switch (method) {
      case Method::reflection:
        s = reflection_series(sensor, rabi, grids.reflection_offsets_hz, dist, slot, index);
        break;

      case Method::rabi: {
        s = rabi_trace(sensor, DriveConfig::resonant(sensor, rabi), grids.pulse_lengths_s);
        double ref = 0.0;
        for (const auto& v : s.y) ref = std::max(ref, std::abs(v.real()));
        // detector noise is referenced to the oscillation amplitude, not the
        // instantaneous value, which crosses zero
        const double sd = sig * ref;
        for (std::size_t i = 0; i < s.size(); ++i) {
          const double u = acquisition_fraction(slot, index, i, s.size());
          double y = s.y[i].real() * dist.amplitude_factor(u) + chain.leakage_amp * ref;
          if (sig > 0.0) y += sd * noise.normal();
          s.y[i] = {y, 0.0};
          s.sigma[i] = sd;
        }
        break;
      }

      case Method::mollow: {
        const auto grid = absolute_grid(angular_to_hz(sensor.omega_a()), grids.mollow_offsets_hz);
        const Spectrum spec = mollow_spectrum(sensor, rabi, grid);
        s.method = Method::mollow;
        s.x = spec.frequencies_hz;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const double u = acquisition_fraction(slot, index, i, grid.size());
          const double ideal = gain * spec.density[i] * dist.power_factor(u);
          const double sd = sig * ideal;
          const double y = sig > 0.0 ? ideal + sd * noise.normal() : ideal;
          s.y.emplace_back(y, 0.0);
          s.sigma.push_back(sd);
        }
        break;
      }

      case Method::mixing: {
        std::vector<double> dd;
        dd.reserve(grids.mixing_delta_d_hz.size());
        for (double f : grids.mixing_delta_d_hz) dd.push_back(hz_to_angular(f));
        s = at_splitting_trace(sensor, rabi, dd);
        for (std::size_t i = 0; i < s.size(); ++i) {
          const double u = acquisition_fraction(slot, index, i, s.size());
          const double ideal = s.y[i].real() * dist.amplitude_factor(u);
          const double sd = sig * ideal;
          const double y = sig > 0.0 ? ideal + sd * noise.normal() : ideal;
          s.y[i] = {y, 0.0};
          s.sigma[i] = sd;
        }
        break;
      }
    }

    s.meta.sensor = sensor.label();
    s.meta.w_in = w_in;
    s.meta.index = index;
    if (method != Method::rabi) {
      // transmitted drive tone at the output, read with the same drifting detector
      const double u = acquisition_fraction(slot, index, 0, 1);
      const double w0 = w_in * db_to_ratio(chain.method_attenuation_db(method));
      double w_out = w0 * gain * dist.power_factor(u);
      if (sig > 0.0) w_out *= 1.0 + sig * noise.normal();
      s.meta.w_out = w_out;
    }
    out.push_back(std::move(s));
  }
  return out;
}

Campaign simulate_campaign(Method method, std::span<const SensorParams> sensors,
                           const ChainConfig& chain, std::span<const double> w_in_list,
                           const SimulationGrids& grids, double omega_drive) {
  const std::size_t per_sensor = 1 + w_in_list.size();
  const AcquisitionSlot all{0, sensors.size() * per_sensor};
  Campaign c;
  for (std::size_t s = 0; s < sensors.size(); ++s) {
    const SensorParams tuned = sensors[s].tuned_to(omega_drive);
    const std::size_t first = s * per_sensor;
    c.characterization.push_back(
        characterization_series(tuned, chain, grids, {first, all.total_series}));
    auto block = generate_dataset(method, tuned, chain, w_in_list, grids,
                                  {first + 1, all.total_series});
    for (auto& series : block) c.series.push_back(std::move(series));
  }
  return c;
}

}  // namespace qpower
