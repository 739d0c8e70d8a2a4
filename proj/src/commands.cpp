#include "qpower/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <ios>
#include <map>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "qpower/calibration.hpp"
#include "qpower/config.hpp"
#include "qpower/csv.hpp"
#include "qpower/fitters.hpp"
#include "qpower/hashing.hpp"
#include "qpower/instrument.hpp"
#include "qpower/report.hpp"
#include "qpower/scattering.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace qpower {
namespace {

class StaleData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config or usage problem detected outside the config parser.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UnknownMethod& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ReportError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const StaleData& e) {
    err << "stale data: " << e.what() << "\n";
    return kExitStale;
  } catch (const CsvError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const json::exception& e) {
    err << "I/O error: malformed JSON (" << e.what() << ")\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

RunConfig read_config(const CommandArgs& args) {
  if (args.config.empty()) throw UsageError("--config is required");
  RunConfig cfg = load_config(args.config);
  if (args.seed) cfg.chain.seed = *args.seed;
  return cfg;
}

Method choose_method(const CommandArgs& args, const RunConfig& cfg) {
  if (args.method) return parse_method(*args.method);
  if (cfg.method) return *cfg.method;
  throw UsageError("no method given (use --method " + valid_method_list() + ")");
}

std::string series_file(const std::string& sensor, Method m, std::size_t j) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02zu", j);
  return sensor + "_" + std::string(to_string(m)) + "_" + buf + ".csv";
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::ios_base::failure("cannot create directory " + dir.string());
}

json file_entry(const std::string& name, const std::string& bytes, const MeasurementSeries& s,
                const char* role) {
  return {{"file", name},
          {"sha256", sha256_hex(bytes)},
          {"sensor", s.meta.sensor},
          {"role", role},
          {"w_in_w", s.meta.w_in},
          {"w_out_w", s.meta.w_out ? json(*s.meta.w_out) : json(nullptr)},
          {"index", s.meta.index}};
}

struct LoadedDataset {
  Method method = Method::reflection;
  std::uint64_t seed = 0;
  std::string manifest_hash;
  std::map<std::string, std::string> hashes;
  std::vector<SensorDataset> sensors;
};

LoadedDataset load_dataset(const fs::path& dir) {
  if (dir.empty()) throw UsageError("--data is required");
  const std::string manifest_text = read_file(dir / "manifest.json");
  const json manifest = json::parse(manifest_text);
  if (manifest.at("format") != "qpower-dataset") {
    throw std::ios_base::failure((dir / "manifest.json").string() + " is not a qpower dataset manifest");
  }
  LoadedDataset out;
  out.method = parse_method(manifest.at("method").get<std::string>());
  out.seed = manifest.at("seed").get<std::uint64_t>();
  out.manifest_hash = sha256_hex(manifest_text);

  std::map<std::string, std::size_t> slot;
  for (const auto& entry : manifest.at("files")) {
    const auto name = entry.at("file").get<std::string>();
    if (name.find('/') != std::string::npos || name.find("..") != std::string::npos) {
      throw std::ios_base::failure("manifest names a file outside the dataset: " + name);
    }
    const std::string bytes = read_file(dir / name);
    const std::string digest = sha256_hex(bytes);
    if (digest != entry.at("sha256").get<std::string>()) {
      throw StaleData(name + " does not match the hash recorded in the manifest");
    }
    out.hashes[name] = digest;
    const bool characterization = entry.at("role") == "characterization";
    MeasurementSeries s =
        series_from_csv(bytes, characterization ? Method::reflection : out.method, name);
    s.meta.sensor = entry.at("sensor").get<std::string>();
    s.meta.w_in = entry.at("w_in_w").get<double>();
    if (!entry.at("w_out_w").is_null()) s.meta.w_out = entry.at("w_out_w").get<double>();
    s.meta.index = entry.at("index").get<std::size_t>();
    s.meta.characterization = characterization;

    auto [it, inserted] = slot.try_emplace(s.meta.sensor, out.sensors.size());
    if (inserted) out.sensors.push_back(SensorDataset{s.meta.sensor, {}, {}});
    auto& ds = out.sensors[it->second];
    if (characterization) {
      ds.characterization = std::move(s);
    } else {
      ds.series.push_back(std::move(s));
    }
  }
  for (const auto& ds : out.sensors) {
    if (ds.characterization.size() == 0) {
      throw std::ios_base::failure("sensor " + ds.sensor + " has no characterization file");
    }
  }
  return out;
}

}  // namespace

int cmd_simulate(const CommandArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = read_config(args);
    const Method method = choose_method(args, cfg);
    if (args.out.empty()) throw UsageError("--out is required");
    const auto& powers = cfg.powers(method);
    const Campaign campaign =
        simulate_campaign(method, cfg.sensors, cfg.chain, powers, cfg.grids, cfg.drive_omega());

    ensure_directory(args.out);
    json files = json::array();
    for (const auto& s : campaign.characterization) {
      const std::string name = s.meta.sensor + "_characterization.csv";
      const std::string bytes = series_to_csv(s);
      write_file_atomic(args.out / name, bytes);
      files.push_back(file_entry(name, bytes, s, "characterization"));
    }
    std::map<std::string, std::size_t> counter;
    for (const auto& s : campaign.series) {
      const std::string name = series_file(s.meta.sensor, method, counter[s.meta.sensor]++);
      const std::string bytes = series_to_csv(s);
      write_file_atomic(args.out / name, bytes);
      files.push_back(file_entry(name, bytes, s, "sweep"));
    }
    const json manifest = {
        {"format", "qpower-dataset"},
        {"version", 1},
        {"method", std::string(to_string(method))},
        {"seed", cfg.chain.seed},
        {"config_sha256", sha256_hex(cfg.text)},
        {"drive_frequency_hz", cfg.drive_frequency_hz},
        {"files", files}};
    write_file_atomic(args.out / "manifest.json", manifest.dump(2) + "\n");
    out << "wrote " << campaign.series.size() << " " << to_string(method) << " series and "
        << campaign.characterization.size() << " characterization lineshapes to "
        << args.out.string() << "\n";
    return kExitOk;
  });
}

int cmd_characterize(const CommandArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    double normalization = 0.0;
    bool fit_offset = false;
    if (!args.config.empty()) {
      const RunConfig cfg = read_config(args);
      const auto opts = cfg.pipeline_options(Method::reflection);
      normalization = opts.normalization_rel;
      fit_offset = opts.fit_offset;
    }
    const LoadedDataset data = load_dataset(args.data);
    LineshapeOptions ls;
    ls.weak_drive = false;
    ls.fit_offset = fit_offset;
    ls.normalization_rel = normalization;

    json rows = json::array();
    std::ostringstream table;
    table << "Qubit     | Gamma1/2pi [MHz] | Gamma2/2pi [MHz] | Extinction\n";
    table << "----------+------------------+------------------+-----------\n";
    bool failed = false;
    for (const auto& ds : data.sensors) {
      char line[160];
      try {
        const FitResult fit = fit_reflection_lineshape(ds.characterization, ls);
        const double g1 = fit.value("gamma1"), g2 = fit.value("gamma2");
        const double ext = extinction(SensorParams(ds.sensor, 1.0, g1, std::max(g2, 0.5 * g1)));
        std::snprintf(line, sizeof line, "%-10s| %7.2f ± %-7.2f | %7.2f ± %-7.2f | %5.1f%%\n",
                      ds.sensor.c_str(), angular_to_hz(g1) / 1e6, angular_to_hz(fit.sigma("gamma1")) / 1e6,
                      angular_to_hz(g2) / 1e6, angular_to_hz(fit.sigma("gamma2")) / 1e6, 100.0 * ext);
        table << line;
        rows.push_back({{"sensor", ds.sensor},
                        {"ok", true},
                        {"center_hz", fit.derived.at("center_hz")},
                        {"gamma1", fit.value("gamma1")},
                        {"gamma1_sigma", fit.sigma("gamma1")},
                        {"gamma2", fit.value("gamma2")},
                        {"gamma2_sigma", fit.sigma("gamma2")},
                        {"extinction", ext},
                        {"reduced_chi2", fit.reduced_chi2},
                        {"warnings", fit.warnings}});
      } catch (const std::exception& e) {
        failed = true;
        std::snprintf(line, sizeof line, "%-10s| failed\n", ds.sensor.c_str());
        table << line;
        rows.push_back({{"sensor", ds.sensor}, {"ok", false}, {"error", e.what()}});
      }
    }
    const fs::path dest = args.out.empty() ? args.data : args.out;
    ensure_directory(dest);
    const json doc = {{"format", "qpower-characterization"},
                      {"version", 1},
                      {"seed", data.seed},
                      {"manifest_sha256", data.manifest_hash},
                      {"rows", rows}};
    write_file_atomic(dest / "characterization.json", doc.dump(2) + "\n");
    out << table.str();
    return failed ? kExitPartial : kExitOk;
  });
}

int cmd_calibrate(const CommandArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = read_config(args);
    const LoadedDataset data = load_dataset(args.data);
    Method method = data.method;
    if (args.method) {
      method = parse_method(*args.method);
      if (method != data.method) {
        throw UsageError("--method " + *args.method + " does not match the dataset method " +
                         std::string(to_string(data.method)));
      }
    }
    CalibrationReport report = run_method_pipeline(method, data.sensors, cfg.pipeline_options(method));
    report.drive_frequency_hz = cfg.drive_frequency_hz;

    Provenance prov;
    prov.seed = data.seed;
    prov.config_hash = sha256_hex(cfg.text);
    prov.manifest_hash = data.manifest_hash;
    prov.datasets = data.hashes;

    const fs::path dest = args.out.empty() ? args.data : args.out;
    ensure_directory(dest);
    const std::string table = calibration_table(report);
    write_file_atomic(dest / "report.json", report_to_json(report, prov));
    write_file_atomic(dest / "report.txt", table);
    out << table;
    if (report.any_failed()) {
      err << "warning: at least one sensor row failed\n";
      return kExitPartial;
    }
    return kExitOk;
  });
}

int cmd_report(const CommandArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (args.reports.empty()) throw UsageError("no report files given");
    std::vector<ReportSummary> summaries;
    for (const auto& p : args.reports) summaries.push_back(summary_from_json(read_file(p), p.string()));
    const Comparison cmp = compare_reports(std::move(summaries));
    const std::string table = comparison_table(cmp);
    if (!args.out.empty()) {
      ensure_directory(args.out);
      write_file_atomic(args.out / "comparison.txt", table);
    }
    out << table;
    if (cmp.exceeds_limit) {
      err << "warning: method-to-method spread " << cmp.spread_db << " dB exceeds "
          << kSpreadLimitDb << " dB\n";
      return kExitSpread;
    }
    return kExitOk;
  });
}

}  // namespace qpower
