#include "qpower/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qpower/fitters.hpp"
#include "qpower/mixing.hpp"
#include "qpower/parallel.hpp"
#include "qpower/scattering.hpp"

namespace qpower {
namespace {

constexpr double kDbPerLn = 10.0 / std::numbers::ln10;

std::size_t closest_index(const std::vector<double>& x, double target) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::abs(x[i] - target) < std::abs(x[best] - target)) best = i;
  }
  return best;
}

CharacterizedSensor characterize(const SensorDataset& data, const PipelineOptions& options,
                                 SensorRow& row) {
  LineshapeOptions ls;
  ls.weak_drive = false;
  ls.fit_offset = options.fit_offset;
  ls.normalization_rel = options.normalization_rel;
  const FitResult fit = fit_reflection_lineshape(data.characterization, ls);
  row.fits.push_back(summarize(fit, "characterization", data.characterization.meta.w_in));
  const auto i1 = static_cast<Eigen::Index>(fit.index("gamma1"));
  const auto i2 = static_cast<Eigen::Index>(fit.index("gamma2"));
  CharacterizedSensor out{sensor_from_lineshape(fit, data.sensor), fit.sigma("gamma1"),
                          fit.sigma("gamma2"), fit.covariance(i1, i2)};
  row.center_hz = fit.derived.at("center_hz");
  row.gamma1 = {out.params.gamma1(), out.sigma_gamma1};
  row.gamma2 = {out.params.gamma2(), out.sigma_gamma2};
  return out;
}

// Reflection: one k for the whole sweep, so every W0 shares its error.
std::vector<PowerEstimate> reflection_powers(const SensorDataset& data,
                                             const CharacterizedSensor& sensor,
                                             const PipelineOptions& options, SensorRow& row,
                                             double& common_rel) {
  PowerSweep sweep;
  const double center_hz = angular_to_hz(sensor.params.omega_a());
  for (const auto& s : data.series) {
    const std::size_t i = closest_index(s.x, center_hz);
    sweep.w_in.push_back(s.meta.w_in);
    sweep.r_res.push_back(s.y[i].real());
    sweep.sigma.push_back(s.sigma[i]);
  }
  PowerSweepOptions po;
  po.fit_offset = options.fit_offset;
  const FitResult fit = fit_r_vs_power(sweep, sensor.params, po);
  row.fits.push_back(summarize(fit, "r_vs_power"));

  const double k = fit.value("k");
  const double g1 = sensor.params.gamma1();
  // ln W0 = ln k(G1, G2) - ln G1 + const
  const double d1 = fit.derived.at("dlnk_dgamma1") - 1.0 / g1;
  const double d2 = fit.derived.at("dlnk_dgamma2");
  const double var_rates = d1 * d1 * sensor.sigma_gamma1 * sensor.sigma_gamma1 +
                           d2 * d2 * sensor.sigma_gamma2 * sensor.sigma_gamma2 +
                           2.0 * d1 * d2 * sensor.cov_gamma12;
  common_rel = std::sqrt(fit.rel_sigma("k") * fit.rel_sigma("k") + std::max(0.0, var_rates));

  std::vector<PowerEstimate> out;
  for (double w_in : sweep.w_in) {
    PowerEstimate p;
    p.w0 = kHbar * sensor.params.omega_a() * k * w_in / (2.0 * g1);
    p.sigma_w0 = common_rel * p.w0;
    p.rel_stat = 0.0;
    p.method = Method::reflection;
    p.sensor = data.sensor;
    p.w_in = w_in;
    out.push_back(p);
  }
  return out;
}

PowerEstimate slice_power(const MeasurementSeries& s, const CharacterizedSensor& sensor,
                          SensorRow& row) {
  const std::size_t i = closest_index(s.x, 0.0);
  const double alpha = s.y[i].real();
  const double nu = photon_rate_from_slice(sensor.params, 1.0, alpha, true);
  PowerEstimate p;
  p.w0 = kHbar * sensor.params.omega_a() * nu;
  p.rel_stat = alpha > 0.0 ? s.sigma[i] / alpha : 0.0;
  p.sigma_w0 = p.w0 * std::hypot(p.rel_stat, sensor.sigma_gamma1 / sensor.params.gamma1());
  p.method = Method::mixing;
  p.sensor = row.sensor;
  p.w_in = s.meta.w_in;
  FitRecord rec;
  rec.stage = "alpha_slice";
  rec.w_in = s.meta.w_in;
  rec.values["alpha_m"] = alpha;
  rec.sigmas["alpha_m"] = s.sigma[i];
  rec.values["eta"] = eta_correction(sensor.params.chi(), alpha);
  rec.converged = true;
  row.fits.push_back(rec);
  return p;
}

PowerEstimate fitted_power(Method method, const MeasurementSeries& s,
                           const CharacterizedSensor& sensor, SensorRow& row) {
  Measured rabi;
  switch (method) {
    case Method::rabi: {
      const FitResult fit = fit_damped_sinusoid(s);
      row.fits.push_back(summarize(fit, "damped_sinusoid", s.meta.w_in));
      const double osc = fit.value("rabi");
      rabi.value = rabi_from_oscillation(osc, sensor.params);
      rabi.sigma = rabi_oscillation_jacobian(osc, sensor.params) * fit.sigma("rabi");
      break;
    }
    case Method::mollow: {
      const FitResult fit = fit_mollow(s, sensor.params);
      row.fits.push_back(summarize(fit, "mollow", s.meta.w_in));
      rabi = {fit.value("rabi"), fit.sigma("rabi")};
      break;
    }
    case Method::mixing: {
      const FitResult fit = fit_at_splitting(s, sensor.params);
      row.fits.push_back(summarize(fit, "at_splitting", s.meta.w_in));
      rabi = {fit.value("rabi"), fit.sigma("rabi")};
      break;
    }
    case Method::reflection:
      throw std::logic_error("reflection powers come from the r-vs-power fit");
  }
  return absolute_power(rabi, sensor, method, s.meta.w_in);
}

SensorRow run_sensor(Method method, const SensorDataset& data, const PipelineOptions& options) {
  SensorRow row;
  row.sensor = data.sensor;
  try {
    if (data.series.empty()) throw CalibrationError("no power series for sensor " + data.sensor);
    for (const auto& s : data.series) {
      if (s.method != method) {
        throw CalibrationError("series of method " + std::string(to_string(s.method)) +
                               " in a " + std::string(to_string(method)) + " pipeline");
      }
    }
    const CharacterizedSensor sensor = characterize(data, options, row);
    double common_rel = sensor.sigma_gamma1 / sensor.params.gamma1();

    if (method == Method::reflection) {
      row.powers = reflection_powers(data, sensor, options, row, common_rel);
    } else {
      for (const auto& s : data.series) {
        row.powers.push_back(method == Method::mixing && options.mixing_slice
                                 ? slice_power(s, sensor, row)
                                 : fitted_power(method, s, sensor, row));
      }
    }
    row.attenuation = attenuation_fit(row.powers, common_rel);

    const bool have_out = std::all_of(data.series.begin(), data.series.end(),
                                      [](const MeasurementSeries& s) { return s.meta.w_out.has_value(); });
    if (have_out) {
      std::vector<double> x, y, sig;
      for (std::size_t i = 0; i < row.powers.size(); ++i) {
        x.push_back(row.powers[i].w0);
        y.push_back(*data.series[i].meta.w_out);
        sig.push_back(0.0);
      }
      row.gain = proportional_fit(x, y, sig, common_rel);
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

std::optional<CombinedEstimate> combine_rows(const std::vector<SensorRow>& rows, bool gain) {
  std::vector<DbEstimate> est;
  for (const auto& r : rows) {
    const auto& fit = gain ? r.gain : r.attenuation;
    if (r.ok && fit) est.push_back(row_estimate(*fit));
  }
  if (est.empty()) return std::nullopt;
  if (est.size() == 1) return CombinedEstimate{est[0].value, est[0].sigma, 0.0, est[0].sigma == 0.0};
  return combine_estimates(est);
}

}  // namespace

double propagate_uncertainty(double rel_d_rabi, double rel_d_gamma1) {
  if (!(rel_d_rabi >= 0.0 && rel_d_rabi <= 0.5) || !(rel_d_gamma1 >= 0.0 && rel_d_gamma1 <= 0.5)) {
    throw DomainError("propagate_uncertainty: relative errors must lie in [0, 0.5]");
  }
  return std::hypot(2.0 * rel_d_rabi, rel_d_gamma1);
}

PowerEstimate absolute_power(Measured rabi, const CharacterizedSensor& sensor, Method method,
                             double w_in) {
  if (!(rabi.value > 0.0)) throw DomainError("absolute_power: Omega must be > 0");
  const double g1 = sensor.params.gamma1();
  PowerEstimate p;
  p.w0 = absolute_power(rabi.value, g1, sensor.params.omega_a());
  p.rel_stat = 2.0 * rabi.rel();
  p.sigma_w0 = p.w0 * std::hypot(p.rel_stat, sensor.sigma_gamma1 / g1);
  p.method = method;
  p.sensor = sensor.params.label();
  p.w_in = w_in;
  return p;
}

SlopeFit proportional_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma_y, double common_rel) {
  const std::size_t n = x.size();
  if (y.size() != n || sigma_y.size() != n) throw std::invalid_argument("proportional_fit: length mismatch");
  if (n < 3) throw CalibrationError("slope fit needs at least 3 points");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (!(*lo > 0.0)) throw CalibrationError("slope fit needs positive input powers");
  if (ratio_to_db(*hi / *lo) < 10.0 - 1e-9) {
    throw CalibrationError("slope fit needs input powers spanning at least 10 dB");
  }
  const bool relative = std::any_of(sigma_y.begin(), sigma_y.end(), [](double s) { return s == 0.0; });
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = relative ? y[i] : sigma_y[i];
    if (!(s != 0.0) || !std::isfinite(s)) throw CalibrationError("slope fit: invalid point weight");
    w[i] = 1.0 / (s * s);
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * x[i] * x[i];
    sxy += w[i] * x[i] * y[i];
  }
  SlopeFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  if (!(fit.slope > 0.0)) throw CalibrationError("fitted slope is not positive");
  double chi2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = y[i] - fit.slope * x[i];
    chi2 += w[i] * d * d;
  }
  fit.reduced_chi2 = chi2 / static_cast<double>(n - 1);
  const double var = (relative ? fit.reduced_chi2 : std::max(1.0, fit.reduced_chi2)) / sxx;
  fit.rel_stat = std::sqrt(var) / fit.slope;
  fit.rel_common = common_rel;
  fit.db = ratio_to_db(fit.slope);
  fit.sigma_db = kDbPerLn * std::hypot(fit.rel_stat, common_rel);
  return fit;
}

SlopeFit attenuation_fit(std::span<const PowerEstimate> points, double common_rel) {
  std::vector<double> x, y, s;
  for (const auto& p : points) {
    if (!(p.w0 > 0.0)) throw CalibrationError("attenuation_fit: W0 must be > 0");
    x.push_back(p.w_in);
    y.push_back(p.w0);
    s.push_back(p.rel_stat * p.w0);
  }
  return proportional_fit(x, y, s, common_rel);
}

CombinedEstimate combine_estimates(std::span<const DbEstimate> rows) {
  if (rows.size() < 2) throw std::invalid_argument("combine_estimates needs at least 2 rows");
  CombinedEstimate out;
  double lo = rows[0].value, hi = rows[0].value;
  for (const auto& r : rows) {
    lo = std::min(lo, r.value);
    hi = std::max(hi, r.value);
  }
  out.max_spread = hi - lo;

  double exact_sum = 0.0;
  std::size_t exact_n = 0;
  for (const auto& r : rows) {
    if (r.sigma == 0.0) {
      exact_sum += r.value;
      ++exact_n;
    }
  }
  if (exact_n > 0) {
    out.value = exact_sum / static_cast<double>(exact_n);
    out.exact_row = true;
    return out;
  }
  double sw = 0.0, swx = 0.0;
  for (const auto& r : rows) {
    const double w = 1.0 / (r.sigma * r.sigma);
    sw += w;
    swx += w * r.value;
  }
  out.value = swx / sw;
  out.sigma = 1.0 / std::sqrt(sw);
  return out;
}

FitRecord summarize(const FitResult& fit, std::string stage, double w_in) {
  FitRecord rec;
  rec.stage = std::move(stage);
  rec.w_in = w_in;
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    if (fit.fixed[i]) continue;
    rec.values[fit.names[i]] = fit.params[static_cast<Eigen::Index>(i)];
    rec.sigmas[fit.names[i]] = fit.sigma(fit.names[i]);
  }
  for (const auto& [k, v] : fit.derived) rec.values[k] = v;
  rec.reduced_chi2 = fit.reduced_chi2;
  rec.converged = fit.converged;
  rec.n_iter = fit.n_iter;
  rec.warnings = fit.warnings;
  return rec;
}

bool CalibrationReport::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const SensorRow& r) { return !r.ok; });
}

DbEstimate row_estimate(const SlopeFit& fit) { return {fit.db, fit.sigma_db}; }

std::vector<SensorDataset> datasets_from_campaign(const Campaign& campaign) {
  std::vector<SensorDataset> out;
  for (const auto& c : campaign.characterization) out.push_back({c.meta.sensor, c, {}});
  for (const auto& s : campaign.series) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SensorDataset& d) { return d.sensor == s.meta.sensor; });
    if (it == out.end()) throw std::invalid_argument("series for uncharacterized sensor " + s.meta.sensor);
    it->series.push_back(s);
  }
  return out;
}

CalibrationReport run_method_pipeline(Method method, std::span<const SensorDataset> datasets,
                                      const PipelineOptions& options) {
  CalibrationReport report;
  report.method = method;
  report.mixing_slice = method == Method::mixing && options.mixing_slice;
  report.setup_offset_db = options.setup_offset_db;

  std::vector<SensorRow> rows(datasets.size());
  parallel_for(datasets.size(), [&](std::size_t i) { rows[i] = run_sensor(method, datasets[i], options); });
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SensorRow& a, const SensorRow& b) { return a.sensor < b.sensor; });
  report.rows = std::move(rows);
  for (const auto& r : report.rows) {
    if (r.ok) {
      report.drive_frequency_hz = r.center_hz;
      break;
    }
  }
  report.attenuation = combine_rows(report.rows, false);
  report.gain = combine_rows(report.rows, true);
  return report;
}

}  // namespace qpower
