#include "qpower/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "qpower/presets.hpp"

namespace qpower {
namespace {

enum class Kind { number, integer, boolean, text, list };

struct KeySpec {
  std::string_view key;
  Kind kind;
};

constexpr KeySpec kRunKeys[] = {
    {"seed", Kind::integer}, {"method", Kind::text}, {"drive_frequency_ghz", Kind::number}};
constexpr KeySpec kChainKeys[] = {
    {"attenuation_db", Kind::number},     {"gain_db", Kind::number},
    {"noise_sigma", Kind::number},        {"drift_db", Kind::number},
    {"drift_cycles", Kind::number},       {"leakage", Kind::number},
    {"k_atten", Kind::number},            {"offset_reflection_db", Kind::number},
    {"offset_rabi_db", Kind::number},     {"offset_mollow_db", Kind::number},
    {"offset_mixing_db", Kind::number}};
constexpr KeySpec kSensorKeys[] = {{"preset", Kind::text},
                                   {"frequency_ghz", Kind::number},
                                   {"gamma1_mhz", Kind::number},
                                   {"gamma2_mhz", Kind::number}};
constexpr KeySpec kCharacterizationKeys[] = {
    {"power_dbm", Kind::number}, {"span_mhz", Kind::number}, {"points", Kind::integer}};
constexpr KeySpec kSweepKeys[] = {
    {"powers_dbm", Kind::list}, {"span_mhz", Kind::number}, {"points", Kind::integer}};
constexpr KeySpec kMixingKeys[] = {{"powers_dbm", Kind::list},
                                   {"span_mhz", Kind::number},
                                   {"points", Kind::integer},
                                   {"mode", Kind::text}};
constexpr KeySpec kRabiKeys[] = {{"powers_dbm", Kind::list},
                                 {"pulse_start_ns", Kind::number},
                                 {"pulse_stop_ns", Kind::number},
                                 {"points", Kind::integer}};
constexpr KeySpec kCalibrationKeys[] = {{"fit_offset", Kind::boolean},
                                        {"normalization_rel", Kind::number}};

std::span<const KeySpec> keys_for(std::string_view section) {
  if (section == "run") return kRunKeys;
  if (section == "chain") return kChainKeys;
  if (section.starts_with("sensor.")) return kSensorKeys;
  if (section == "characterization") return kCharacterizationKeys;
  if (section == "reflection" || section == "mollow") return kSweepKeys;
  if (section == "mixing") return kMixingKeys;
  if (section == "rabi") return kRabiKeys;
  if (section == "calibration") return kCalibrationKeys;
  return {};
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Entry, std::less<>> entries;
};

class Reader {
 public:
  explicit Reader(std::string_view source) : source_(source) {}

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(std::string(source_) + ":" + std::to_string(line) + ": " + msg);
  }

  std::vector<Section> parse(std::string_view text) {
    std::vector<Section> sections;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto end = text.find('\n', pos);
      std::string_view line = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
      pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
      ++line_no;
      if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      line = trim(line);
      if (line.empty()) continue;

      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "malformed section header");
        const std::string name(trim(line.substr(1, line.size() - 2)));
        if (keys_for(name).empty() || name == "sensor.") fail(line_no, "unknown section [" + name + "]");
        for (const auto& s : sections) {
          if (s.name == name) fail(line_no, "duplicate section [" + name + "]");
        }
        sections.push_back({name, line_no, {}});
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
      if (sections.empty()) fail(line_no, "key outside of any section");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      auto& sec = sections.back();
      const auto spec = keys_for(sec.name);
      const auto it = std::find_if(spec.begin(), spec.end(), [&](const KeySpec& k) { return k.key == key; });
      if (it == spec.end()) {
        std::string valid;
        for (const auto& k : spec) valid += (valid.empty() ? "" : ", ") + std::string(k.key);
        fail(line_no, "unknown key '" + key + "' in [" + sec.name + "] (valid: " + valid + ")");
      }
      if (value.empty()) fail(line_no, "empty value for '" + key + "'");
      if (sec.entries.count(key)) fail(line_no, "duplicate key '" + key + "'");
      sec.entries[key] = {value, line_no};
    }
    return sections;
  }

  double number(const Entry& e, std::string_view key) const {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
      fail(e.line, "'" + std::string(key) + "' expects a number, got '" + e.value + "'");
    }
    return v;
  }

  std::uint64_t integer(const Entry& e, std::string_view key) const {
    std::uint64_t v = 0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
      fail(e.line, "'" + std::string(key) + "' expects a non-negative integer, got '" + e.value + "'");
    }
    return v;
  }

  bool boolean(const Entry& e, std::string_view key) const {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    fail(e.line, "'" + std::string(key) + "' expects true or false");
  }

  std::vector<double> list(const Entry& e, std::string_view key) const {
    if (std::count(e.value.begin(), e.value.end(), ':') == 2) {
      std::vector<std::string> parts;
      std::stringstream ss(e.value);
      for (std::string p; std::getline(ss, p, ':');) parts.push_back(std::string(trim(p)));
      const double a = number({parts[0], e.line}, key);
      const double b = number({parts[1], e.line}, key);
      const auto n = integer({parts[2], e.line}, key);
      if (n < 1) fail(e.line, "'" + std::string(key) + "' range needs at least one point");
      return linspace(a, b, n);
    }
    std::vector<double> out;
    std::stringstream ss(e.value);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number({std::string(trim(p)), e.line}, key));
    return out;
  }

 private:
  std::string_view source_;
};

std::string_view method_key(Method m) {
  switch (m) {
    case Method::reflection: return "offset_reflection_db";
    case Method::rabi: return "offset_rabi_db";
    case Method::mollow: return "offset_mollow_db";
    case Method::mixing: return "offset_mixing_db";
  }
  return {};
}

}  // namespace

std::vector<SensorParams> RunConfig::tuned_sensors() const {
  std::vector<SensorParams> out;
  for (const auto& s : sensors) out.push_back(s.tuned_to(drive_omega()));
  return out;
}

PipelineOptions RunConfig::pipeline_options(Method m) const {
  PipelineOptions o;
  o.mixing_slice = m == Method::mixing && mixing_slice;
  o.fit_offset = fit_offset;
  o.normalization_rel = normalization_rel.value_or(db_to_ratio(chain.drift_db / 2.0) - 1.0);
  o.setup_offset_db = chain.setup_offset(m);
  return o;
}

RunConfig parse_config(std::string_view text, std::string_view source) {
  Reader rd(source);
  const auto sections = rd.parse(text);

  RunConfig cfg;
  cfg.text = std::string(text);
  cfg.chain.setup_offset_db = default_setup_offsets();
  for (Method m : kAllMethods) {
    const auto sc = default_scenario(m);
    for (double dbm : sc.powers_dbm) cfg.powers_w[static_cast<std::size_t>(m)].push_back(dbm_to_watts(dbm));
    switch (m) {
      case Method::reflection:
        cfg.grids.characterization_offsets_hz = sc.grids.characterization_offsets_hz;
        cfg.grids.characterization_w_in = sc.grids.characterization_w_in;
        cfg.grids.reflection_offsets_hz = sc.grids.reflection_offsets_hz;
        break;
      case Method::rabi: cfg.grids.pulse_lengths_s = sc.grids.pulse_lengths_s; break;
      case Method::mollow: cfg.grids.mollow_offsets_hz = sc.grids.mollow_offsets_hz; break;
      case Method::mixing: cfg.grids.mixing_delta_d_hz = sc.grids.mixing_delta_d_hz; break;
    }
  }

  auto get = [](const Section& s, std::string_view key) -> const Entry* {
    const auto it = s.entries.find(key);
    return it == s.entries.end() ? nullptr : &it->second;
  };
  auto positive = [&](const Entry& e, std::string_view key) {
    const double v = rd.number(e, key);
    if (!(v > 0.0)) rd.fail(e.line, "'" + std::string(key) + "' must be > 0");
    return v;
  };
  auto non_negative = [&](const Entry& e, std::string_view key) {
    const double v = rd.number(e, key);
    if (!(v >= 0.0)) rd.fail(e.line, "'" + std::string(key) + "' must be >= 0");
    return v;
  };
  auto points = [&](const Entry& e) {
    const auto n = rd.integer(e, "points");
    if (n < 5 || n > 1000000) rd.fail(e.line, "'points' must lie in [5, 1000000]");
    return static_cast<std::size_t>(n);
  };
  auto sweep = [&](const Section& s, Method m, std::vector<double>& grid) {
    if (const auto* e = get(s, "powers_dbm")) {
      auto& w = cfg.powers_w[static_cast<std::size_t>(m)];
      w.clear();
      for (double dbm : rd.list(*e, "powers_dbm")) w.push_back(dbm_to_watts(dbm));
      if (w.empty()) rd.fail(e->line, "'powers_dbm' is empty");
    }
    double span = grid.empty() ? 0.0 : grid.back();
    std::size_t n = grid.size();
    if (const auto* e = get(s, "span_mhz")) span = positive(*e, "span_mhz") * 1e6;
    if (const auto* e = get(s, "points")) n = points(*e);
    grid = linspace(-span, span, n);
  };

  for (const auto& s : sections) {
    if (s.name == "run") {
      if (const auto* e = get(s, "seed")) cfg.chain.seed = rd.integer(*e, "seed");
      if (const auto* e = get(s, "method")) {
        try {
          cfg.method = parse_method(e->value);
        } catch (const UnknownMethod& ex) {
          rd.fail(e->line, ex.what());
        }
      }
      if (const auto* e = get(s, "drive_frequency_ghz")) {
        cfg.drive_frequency_hz = positive(*e, "drive_frequency_ghz") * 1e9;
      }
    } else if (s.name == "chain") {
      auto& c = cfg.chain;
      if (const auto* e = get(s, "attenuation_db")) c.attenuation_db = rd.number(*e, "attenuation_db");
      if (const auto* e = get(s, "gain_db")) c.gain_db = rd.number(*e, "gain_db");
      if (const auto* e = get(s, "noise_sigma")) c.noise_sigma = non_negative(*e, "noise_sigma");
      if (const auto* e = get(s, "drift_db")) c.drift_db = non_negative(*e, "drift_db");
      if (const auto* e = get(s, "drift_cycles")) c.drift_cycles = positive(*e, "drift_cycles");
      if (const auto* e = get(s, "leakage")) c.leakage_amp = non_negative(*e, "leakage");
      if (const auto* e = get(s, "k_atten")) c.k_atten = positive(*e, "k_atten");
      for (Method m : kAllMethods) {
        if (const auto* e = get(s, method_key(m))) {
          c.setup_offset_db[static_cast<std::size_t>(m)] = rd.number(*e, method_key(m));
        }
      }
    } else if (s.name.starts_with("sensor.")) {
      const std::string label = s.name.substr(7);
      double f_hz = kPresetFrequencyHz, g1 = 0.0, g2 = 0.0;
      bool have_rates = false;
      if (const auto* e = get(s, "preset")) {
        try {
          const auto& p = preset_entry(e->value);
          g1 = p.gamma1_mhz * 1e6;
          g2 = p.gamma2_mhz * 1e6;
          have_rates = true;
        } catch (const UnknownPreset& ex) {
          rd.fail(e->line, ex.what());
        }
      }
      if (const auto* e = get(s, "frequency_ghz")) f_hz = positive(*e, "frequency_ghz") * 1e9;
      const auto* e1 = get(s, "gamma1_mhz");
      const auto* e2 = get(s, "gamma2_mhz");
      if (e1) g1 = positive(*e1, "gamma1_mhz") * 1e6;
      if (e2) g2 = positive(*e2, "gamma2_mhz") * 1e6;
      if (!have_rates && !(e1 && e2)) {
        rd.fail(s.line, "[" + s.name + "] needs 'preset' or both 'gamma1_mhz' and 'gamma2_mhz'");
      }
      try {
        cfg.sensors.emplace_back(label, hz_to_angular(f_hz), hz_to_angular(g1), hz_to_angular(g2));
      } catch (const DomainError& ex) {
        rd.fail(s.line, ex.what());
      }
    } else if (s.name == "characterization") {
      if (const auto* e = get(s, "power_dbm")) cfg.grids.characterization_w_in = dbm_to_watts(rd.number(*e, "power_dbm"));
      sweep(s, Method::reflection, cfg.grids.characterization_offsets_hz);
    } else if (s.name == "reflection") {
      sweep(s, Method::reflection, cfg.grids.reflection_offsets_hz);
    } else if (s.name == "mollow") {
      sweep(s, Method::mollow, cfg.grids.mollow_offsets_hz);
    } else if (s.name == "mixing") {
      sweep(s, Method::mixing, cfg.grids.mixing_delta_d_hz);
      if (const auto* e = get(s, "mode")) {
        if (e->value == "slice") {
          cfg.mixing_slice = true;
        } else if (e->value != "at") {
          rd.fail(e->line, "'mode' must be 'at' or 'slice'");
        }
      }
    } else if (s.name == "rabi") {
      if (const auto* e = get(s, "powers_dbm")) {
        auto& w = cfg.powers_w[static_cast<std::size_t>(Method::rabi)];
        w.clear();
        for (double dbm : rd.list(*e, "powers_dbm")) w.push_back(dbm_to_watts(dbm));
        if (w.empty()) rd.fail(e->line, "'powers_dbm' is empty");
      }
      auto& g = cfg.grids.pulse_lengths_s;
      double start = g.front(), stop = g.back();
      std::size_t n = g.size();
      int line = s.line;
      if (const auto* e = get(s, "pulse_start_ns")) start = non_negative(*e, "pulse_start_ns") * 1e-9;
      if (const auto* e = get(s, "pulse_stop_ns")) {
        stop = positive(*e, "pulse_stop_ns") * 1e-9;
        line = e->line;
      }
      if (const auto* e = get(s, "points")) n = points(*e);
      if (!(stop > start)) rd.fail(line, "'pulse_stop_ns' must exceed 'pulse_start_ns'");
      g = linspace(start, stop, n);
    } else if (s.name == "calibration") {
      if (const auto* e = get(s, "fit_offset")) cfg.fit_offset = rd.boolean(*e, "fit_offset");
      if (const auto* e = get(s, "normalization_rel")) cfg.normalization_rel = non_negative(*e, "normalization_rel");
    }
  }
  if (cfg.sensors.empty()) rd.fail(1, "no [sensor.<label>] section");
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace qpower
