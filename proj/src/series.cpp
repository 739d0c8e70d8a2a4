#include "qpower/series.hpp"

namespace qpower {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::reflection: return "reflection";
    case Method::rabi: return "rabi";
    case Method::mollow: return "mollow";
    case Method::mixing: return "mixing";
  }
  return "unknown";
}

std::string valid_method_list() {
  std::string out;
  for (Method m : kAllMethods) {
    if (!out.empty()) out += ", ";
    out += to_string(m);
  }
  return out;
}

Method parse_method(std::string_view tag) {
  for (Method m : kAllMethods) {
    if (tag == to_string(m)) return m;
  }
  throw UnknownMethod("unknown method '" + std::string(tag) +
                      "' (valid methods: " + valid_method_list() + ")");
}

void MeasurementSeries::check_shape() const {
  if (y.size() != x.size() || sigma.size() != x.size()) {
    throw std::invalid_argument("measurement series columns have unequal lengths");
  }
}

std::vector<double> MeasurementSeries::real_values() const {
  std::vector<double> out;
  out.reserve(y.size());
  for (const auto& v : y) out.push_back(v.real());
  return out;
}

}  // namespace qpower
