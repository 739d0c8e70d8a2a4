#pragma once

// Turns fitted drive strengths into absolute power at the sensor, line
// attenuation and output gain with propagated uncertainties, and combines the
// per-sensor rows into one estimate.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qpower/fit.hpp"
#include "qpower/instrument.hpp"
#include "qpower/series.hpp"
#include "qpower/units.hpp"

namespace qpower {

class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Measured {
  double value = 0.0;
  double sigma = 0.0;

  double rel() const { return value != 0.0 ? sigma / std::abs(value) : 0.0; }
};

/// Sensor rates from the weak-drive characterization, with their covariance.
struct CharacterizedSensor {
  SensorParams params;
  double sigma_gamma1 = 0.0;
  double sigma_gamma2 = 0.0;
  double cov_gamma12 = 0.0;
};

struct PowerEstimate {
  double w0 = 0.0;        // W at the sensor
  double sigma_w0 = 0.0;  // W, full first-order error
  double rel_stat = 0.0;  // part of sigma_w0/w0 independent between powers
  Method method = Method::reflection;
  std::string sensor;
  double w_in = 0.0;
};

/// sqrt((2 dOmega/Omega)^2 + (dG1/G1)^2). Throws DomainError for inputs
/// outside [0, 0.5].
double propagate_uncertainty(double rel_d_rabi, double rel_d_gamma1);

/// W0 = hbar omega_a Omega^2 / (2 Gamma1) with first-order error.
PowerEstimate absolute_power(Measured rabi, const CharacterizedSensor& sensor,
                             Method method = Method::reflection, double w_in = 0.0);

struct SlopeFit {
  double slope = 0.0;
  double db = 0.0;
  double sigma_db = 0.0;
  double rel_stat = 0.0;    // slope error from the fit itself
  double rel_common = 0.0;  // shared systematic folded in once
  double reduced_chi2 = 0.0;
  std::size_t n = 0;
};

/// Weighted fit of y = s x through the origin, weights 1/sigma_y^2 (all-zero
/// sigma: equal relative weights). The slope error is scaled by
/// max(1, reduced chi2) and combined with common_rel in quadrature. Requires
/// >= 3 points spanning >= 10 dB in x; throws CalibrationError otherwise or for
/// a non-positive slope.
SlopeFit proportional_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma_y, double common_rel = 0.0);

/// W0 = s W_in; attenuation 10 log10(s). Points are weighted by their rel_stat;
/// if any point has none, all points get equal relative weights.
SlopeFit attenuation_fit(std::span<const PowerEstimate> points, double common_rel = 0.0);

struct DbEstimate {
  double value = 0.0;
  double sigma = 0.0;
};

struct CombinedEstimate {
  double value = 0.0;
  double sigma = 0.0;
  double max_spread = 0.0;     // largest row-to-row difference
  bool exact_row = false;      // a zero-variance row dominated
};

/// Inverse-variance mean. Requires >= 2 rows. Zero-variance rows are treated as
/// exact: the result is their mean with zero error and exact_row is set.
CombinedEstimate combine_estimates(std::span<const DbEstimate> rows);

/// One sensor's data for a method pipeline.
struct SensorDataset {
  std::string sensor;
  MeasurementSeries characterization;
  std::vector<MeasurementSeries> series;
};

/// Groups a simulated campaign by sensor, keeping acquisition order.
std::vector<SensorDataset> datasets_from_campaign(const Campaign& campaign);

struct PipelineOptions {
  bool mixing_slice = false;       // single alpha slice instead of the AT fit
  bool fit_offset = false;         // leakage offset in the reflection fits
  double normalization_rel = 0.0;  // |r| normalization uncertainty of the lineshape
  double setup_offset_db = 0.0;    // declared extra loss of this method's setup
};

/// Compact record of one fit inside a pipeline.
struct FitRecord {
  std::string stage;
  double w_in = 0.0;
  std::map<std::string, double> values;
  std::map<std::string, double> sigmas;
  double reduced_chi2 = 0.0;
  bool converged = false;
  int n_iter = 0;
  std::vector<std::string> warnings;
};

FitRecord summarize(const FitResult& fit, std::string stage, double w_in = 0.0);

struct SensorRow {
  std::string sensor;
  bool ok = false;
  std::string error;
  double center_hz = 0.0;
  Measured gamma1;
  Measured gamma2;
  std::optional<SlopeFit> attenuation;
  std::optional<SlopeFit> gain;
  std::vector<PowerEstimate> powers;
  std::vector<FitRecord> fits;
};

struct CalibrationReport {
  Method method = Method::reflection;
  bool mixing_slice = false;
  double setup_offset_db = 0.0;
  double drive_frequency_hz = 0.0;
  std::vector<SensorRow> rows;  // sorted by sensor label
  std::optional<CombinedEstimate> attenuation;
  std::optional<CombinedEstimate> gain;

  bool any_failed() const;
};

/// Characterize each sensor, extract the drive per power with the method's
/// fitter, convert to W0 and fit the attenuation (and gain when every series
/// carries an output power). A failing stage marks only that sensor's row.
CalibrationReport run_method_pipeline(Method method, std::span<const SensorDataset> datasets,
                                      const PipelineOptions& options = {});

/// dB value and error of a slope fit.
DbEstimate row_estimate(const SlopeFit& fit);

}  // namespace qpower
