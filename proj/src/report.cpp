#include "qpower/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace qpower {
namespace {

using nlohmann::json;

json slope_json(const std::optional<SlopeFit>& fit) {
  if (!fit) return nullptr;
  return {{"db", fit->db},
          {"sigma_db", fit->sigma_db},
          {"slope", fit->slope},
          {"rel_stat", fit->rel_stat},
          {"rel_common", fit->rel_common},
          {"reduced_chi2", fit->reduced_chi2},
          {"points", fit->n}};
}

json combined_json(const std::optional<CombinedEstimate>& c) {
  if (!c) return nullptr;
  return {{"db", c->value}, {"sigma_db", c->sigma}, {"max_spread_db", c->max_spread},
          {"exact_row", c->exact_row}};
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json fit_json(const FitRecord& f) {
  json values = json::object();
  for (const auto& [k, v] : f.values) values[k] = finite_or_null(v);
  json sigmas = json::object();
  for (const auto& [k, v] : f.sigmas) sigmas[k] = finite_or_null(v);
  return {{"stage", f.stage},         {"w_in_w", f.w_in},
          {"values", values},         {"sigmas", sigmas},
          {"reduced_chi2", finite_or_null(f.reduced_chi2)},
          {"converged", f.converged}, {"iterations", f.n_iter},
          {"warnings", f.warnings}};
}

std::string pad(std::string s, std::size_t width) {
  // width counts code points; "±" is two bytes in UTF-8
  std::size_t shown = 0;
  for (unsigned char c : s) shown += (c & 0xC0) != 0x80;
  if (shown < width) s.append(width - shown, ' ');
  return s;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

std::string format_db(double value, double sigma) {
  std::string out = fixed(value, 1) + " ± ";
  if (!std::isfinite(sigma)) return out + "?";
  if (sigma < 0.00095) return out + "<0.001";
  int exponent = static_cast<int>(std::floor(std::log10(sigma)));
  double rounded = std::round(sigma / std::pow(10.0, exponent)) * std::pow(10.0, exponent);
  exponent = static_cast<int>(std::floor(std::log10(rounded)));
  return out + fixed(rounded, std::max(0, -exponent));
}

std::string report_to_json(const CalibrationReport& report, const Provenance& provenance) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    json powers = json::array();
    for (const auto& p : r.powers) {
      powers.push_back({{"w_in_w", p.w_in}, {"w0_w", p.w0}, {"sigma_w0_w", p.sigma_w0},
                        {"rel_stat", p.rel_stat}});
    }
    json fits = json::array();
    for (const auto& f : r.fits) fits.push_back(fit_json(f));
    rows.push_back({{"sensor", r.sensor},
                    {"ok", r.ok},
                    {"error", r.ok ? json(nullptr) : json(r.error)},
                    {"center_hz", r.center_hz},
                    {"gamma1", {{"value", r.gamma1.value}, {"sigma", r.gamma1.sigma}}},
                    {"gamma2", {{"value", r.gamma2.value}, {"sigma", r.gamma2.sigma}}},
                    {"attenuation", slope_json(r.attenuation)},
                    {"gain", slope_json(r.gain)},
                    {"powers", powers},
                    {"fits", fits}});
  }
  json doc = {
      {"format", "qpower-report"},
      {"version", 1},
      {"method", std::string(to_string(report.method))},
      {"mixing_mode", report.method == Method::mixing ? json(report.mixing_slice ? "slice" : "at")
                                                      : json(nullptr)},
      {"drive_frequency_hz", report.drive_frequency_hz},
      {"setup_offset_db", report.setup_offset_db},
      {"rows", rows},
      {"combined", {{"attenuation", combined_json(report.attenuation)},
                    {"gain", combined_json(report.gain)}}},
      {"provenance", {{"seed", provenance.seed},
                      {"config_sha256", provenance.config_hash},
                      {"manifest_sha256", provenance.manifest_hash},
                      {"datasets", provenance.datasets}}}};
  return doc.dump(2) + "\n";
}

std::string calibration_table(const CalibrationReport& report) {
  constexpr std::size_t w0 = 10, w1 = 18, w2 = 14;
  std::ostringstream out;
  out << "Method: " << to_string(report.method);
  if (report.method == Method::mixing) out << (report.mixing_slice ? " (single slice)" : " (AT splitting)");
  out << ", setup offset " << fixed(report.setup_offset_db, 1) << " dB\n";
  out << pad("Qubit", w0) << "| " << pad("Attenuation [dB]", w1) << "| Gain [dB]\n";
  out << std::string(w0, '-') << "+-" << std::string(w1, '-') << "+-" << std::string(w2, '-') << "\n";
  auto cell = [](const auto& fit) { return fit ? format_db(fit->db, fit->sigma_db) : std::string("-"); };
  for (const auto& r : report.rows) {
    if (r.ok) {
      out << pad(r.sensor, w0) << "| " << pad(cell(r.attenuation), w1) << "| " << cell(r.gain) << "\n";
    } else {
      out << pad(r.sensor, w0) << "| " << pad("failed", w1) << "| -\n";
    }
  }
  auto combined = [](const std::optional<CombinedEstimate>& c) {
    return c ? format_db(c->value, c->sigma) : std::string("-");
  };
  out << pad("combined", w0) << "| " << pad(combined(report.attenuation), w1) << "| "
      << combined(report.gain) << "\n";
  if (report.attenuation) {
    out << "max spread between qubits: " << fixed(report.attenuation->max_spread, 2) << " dB\n";
  }
  for (const auto& r : report.rows) {
    if (!r.ok) out << "row " << r.sensor << " failed: " << r.error << "\n";
  }
  return out.str();
}

std::optional<double> ReportSummary::line_attenuation() const {
  if (!attenuation) return std::nullopt;
  return attenuation->value - setup_offset_db;
}

ReportSummary summary_from_json(std::string_view text, std::string source) {
  ReportSummary s;
  s.source = std::move(source);
  try {
    const json doc = json::parse(text);
    if (doc.at("format") != "qpower-report") throw ReportError(s.source + ": not a qpower report");
    s.method = doc.at("method").get<std::string>();
    if (doc.at("mixing_mode").is_string()) s.method += "/" + doc.at("mixing_mode").get<std::string>();
    s.drive_frequency_hz = doc.at("drive_frequency_hz").get<double>();
    s.setup_offset_db = doc.at("setup_offset_db").get<double>();
    const auto& c = doc.at("combined");
    if (!c.at("attenuation").is_null()) {
      s.attenuation = DbEstimate{c["attenuation"].at("db").get<double>(),
                                 c["attenuation"].at("sigma_db").get<double>()};
    }
    if (!c.at("gain").is_null()) {
      s.gain = DbEstimate{c["gain"].at("db").get<double>(), c["gain"].at("sigma_db").get<double>()};
    }
  } catch (const json::exception& e) {
    throw ReportError(s.source + ": malformed report (" + e.what() + ")");
  }
  return s;
}

Comparison compare_reports(std::vector<ReportSummary> reports) {
  if (reports.empty()) throw ReportError("no reports to compare");
  const double f0 = reports.front().drive_frequency_hz;
  for (const auto& r : reports) {
    if (std::abs(r.drive_frequency_hz - f0) > 1e-6 * std::abs(f0)) {
      throw ReportError("reports were taken at different drive frequencies (" + r.source + ")");
    }
  }
  Comparison c;
  c.reports = std::move(reports);
  std::optional<double> lo, hi;
  for (const auto& r : c.reports) {
    if (const auto a = r.line_attenuation()) {
      lo = lo ? std::min(*lo, *a) : *a;
      hi = hi ? std::max(*hi, *a) : *a;
    }
  }
  if (lo) c.spread_db = *hi - *lo;
  c.exceeds_limit = c.spread_db > kSpreadLimitDb;
  return c;
}

std::string comparison_table(const Comparison& comparison) {
  constexpr std::size_t w0 = 18, w1 = 18, w2 = 14, w3 = 18;
  std::ostringstream out;
  out << pad("Method", w0) << "| " << pad("Attenuation [dB]", w1) << "| " << pad("Gain [dB]", w2)
      << "| " << pad("Setup offset [dB]", w3) << "| Line attenuation [dB]\n";
  out << std::string(w0, '-') << "+-" << std::string(w1, '-') << "+-" << std::string(w2, '-') << "+-"
      << std::string(w3, '-') << "+-" << std::string(21, '-') << "\n";
  for (const auto& r : comparison.reports) {
    const auto att = r.attenuation ? format_db(r.attenuation->value, r.attenuation->sigma) : std::string("-");
    const auto gain = r.gain ? format_db(r.gain->value, r.gain->sigma) : std::string("-");
    const auto line = r.attenuation ? format_db(*r.line_attenuation(), r.attenuation->sigma) : std::string("-");
    out << pad(r.method, w0) << "| " << pad(att, w1) << "| " << pad(gain, w2) << "| "
        << pad(fixed(r.setup_offset_db, 1), w3) << "| " << line << "\n";
  }
  out << "spread of line attenuation: " << fixed(comparison.spread_db, 2) << " dB";
  if (comparison.exceeds_limit) out << "  WARNING: exceeds " << fixed(kSpreadLimitDb, 1) << " dB";
  out << "\n";
  return out.str();
}

}  // namespace qpower
