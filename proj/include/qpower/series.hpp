#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qpower {

enum class Method { reflection, rabi, mollow, mixing };

inline constexpr Method kAllMethods[] = {Method::reflection, Method::rabi, Method::mollow,
                                         Method::mixing};

std::string_view to_string(Method m);

class UnknownMethod : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parses a method tag; the error message lists the valid tags.
Method parse_method(std::string_view tag);

/// "reflection, rabi, mollow, mixing"
std::string valid_method_list();

struct SeriesMetadata {
  std::string sensor;
  double w_in = 0.0;                 // generator power, W
  std::optional<double> w_out;       // output-line power of the drive tone, W
  std::size_t index = 0;             // position in acquisition order
  bool characterization = false;     // weak-drive lineshape used for Gamma1/Gamma2
};

/// Tabular dataset shared by every method. Reflection data is complex; the
/// other methods carry real values in y.real().
struct MeasurementSeries {
  Method method = Method::reflection;
  std::vector<double> x;
  std::vector<std::complex<double>> y;
  std::vector<double> sigma;
  SeriesMetadata meta;

  std::size_t size() const { return x.size(); }
  bool complex_valued() const { return method == Method::reflection; }

  /// Throws std::invalid_argument if the columns differ in length.
  void check_shape() const;

  std::vector<double> real_values() const;
};

}  // namespace qpower
