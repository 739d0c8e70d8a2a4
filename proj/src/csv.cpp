#include "qpower/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

namespace qpower {
namespace {

std::size_t column_count(Method m) { return m == Method::reflection ? 4 : 3; }

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::string csv_header(Method method) {
  switch (method) {
    case Method::reflection: return "freq_hz,re_r,im_r,sigma";
    case Method::rabi: return "pulse_s,signal,sigma";
    case Method::mollow: return "freq_hz,psd_w_per_hz,sigma";
    case Method::mixing: return "delta_d_hz,alpha,sigma";
  }
  return {};
}

std::string format_number(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

std::string series_to_csv(const MeasurementSeries& series) {
  series.check_shape();
  std::string out = csv_header(series.method);
  out += '\n';
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_number(series.x[i]);
    out += ',';
    out += format_number(series.y[i].real());
    out += ',';
    if (series.complex_valued()) {
      out += format_number(series.y[i].imag());
      out += ',';
    }
    out += format_number(series.sigma[i]);
    out += '\n';
  }
  return out;
}

MeasurementSeries series_from_csv(std::string_view text, Method method, std::string_view source) {
  auto fail = [&](std::size_t line, const std::string& msg) {
    throw CsvError(std::string(source) + ":" + std::to_string(line) + ": " + msg);
  };
  MeasurementSeries s;
  s.method = method;
  const std::size_t ncol = column_count(method);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    pos = end == std::string_view::npos ? text.size() : end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != csv_header(method)) {
        fail(line_no, "expected header '" + csv_header(method) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != ncol) {
      fail(line_no, "expected " + std::to_string(ncol) + " columns, found " + std::to_string(cells.size()));
    }
    double v[4] = {};
    for (std::size_t c = 0; c < ncol; ++c) {
      const char* first = cells[c].data();
      const char* last = first + cells[c].size();
      const auto res = std::from_chars(first, last, v[c]);
      if (res.ec != std::errc{} || res.ptr != last) {
        fail(line_no, "malformed number '" + std::string(cells[c]) + "'");
      }
    }
    s.x.push_back(v[0]);
    if (ncol == 4) {
      s.y.emplace_back(v[1], v[2]);
      s.sigma.push_back(v[3]);
    } else {
      s.y.emplace_back(v[1], 0.0);
      s.sigma.push_back(v[2]);
    }
  }
  if (!header_seen) fail(1, "empty file");
  return s;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::ios_base::failure("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::ios_base::failure("cannot move " + tmp.string() + " into place");
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace qpower
