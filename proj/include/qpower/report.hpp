#pragma once

// Calibration reports: machine-readable JSON, the human table
// "Qubit | Attenuation [dB] | Gain [dB]", and the cross-method comparison.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpower/calibration.hpp"

namespace qpower {

inline constexpr double kSpreadLimitDb = 1.4;

struct Provenance {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string manifest_hash;
  std::map<std::string, std::string> datasets;  // file name -> sha256
};

/// Pretty-printed JSON followed by a newline.
std::string report_to_json(const CalibrationReport& report, const Provenance& provenance);

/// "-99.8 ± 0.2": value to 0.1 dB, error to one significant figure.
/// Errors below a millidecibel print as "<0.001".
std::string format_db(double value, double sigma);

std::string calibration_table(const CalibrationReport& report);

class ReportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The parts of a report.json needed for comparison.
struct ReportSummary {
  std::string source;
  std::string method;
  double drive_frequency_hz = 0.0;
  double setup_offset_db = 0.0;
  std::optional<DbEstimate> attenuation;
  std::optional<DbEstimate> gain;

  /// Attenuation with the declared setup offset removed.
  std::optional<double> line_attenuation() const;
};

ReportSummary summary_from_json(std::string_view text, std::string source);

struct Comparison {
  std::vector<ReportSummary> reports;
  double spread_db = 0.0;  // max - min of the line attenuations
  bool exceeds_limit = false;
};

/// Throws ReportError when the reports were taken at different drive frequencies.
Comparison compare_reports(std::vector<ReportSummary> reports);

std::string comparison_table(const Comparison& comparison);

}  // namespace qpower
