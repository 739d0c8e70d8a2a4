#pragma once

// Dataset files. One CSV per series with a method-specific header:
//   reflection  freq_hz,re_r,im_r,sigma
//   rabi        pulse_s,signal,sigma
//   mollow      freq_hz,psd_w_per_hz,sigma
//   mixing      delta_d_hz,alpha,sigma
// Numbers are written with 17 significant digits, so a write/read cycle is exact.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qpower/series.hpp"

namespace qpower {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string csv_header(Method method);

/// Decimal text with 17 significant digits.
std::string format_number(double v);

std::string series_to_csv(const MeasurementSeries& series);

/// Parses a series of the given method; metadata is left default. Errors name
/// the source and line.
MeasurementSeries series_from_csv(std::string_view text, Method method,
                                  std::string_view source = "<csv>");

/// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace qpower
