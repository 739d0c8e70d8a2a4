#pragma once

// Implementation of the qpower subcommands. Each returns a process exit code
// and never throws.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qpower {

enum ExitCode : int {
  kExitOk = 0,
  kExitSpread = 1,   // cross-method spread above the systematic bound
  kExitConfig = 2,
  kExitIo = 3,
  kExitPartial = 4,  // some sensor rows failed
  kExitStale = 5,    // dataset does not match its manifest
};

struct CommandArgs {
  std::filesystem::path config;
  std::optional<std::string> method;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
  std::filesystem::path data;
  std::vector<std::filesystem::path> reports;
};

/// Writes one CSV per (sensor, power) plus one characterization lineshape per
/// sensor and manifest.json into args.out.
int cmd_simulate(const CommandArgs& args, std::ostream& out, std::ostream& err);

/// Fits the characterization lineshapes of a dataset; writes characterization.json.
int cmd_characterize(const CommandArgs& args, std::ostream& out, std::ostream& err);

/// Runs the method pipeline on a dataset; writes report.json and report.txt.
int cmd_calibrate(const CommandArgs& args, std::ostream& out, std::ostream& err);

/// Merges report.json files into a cross-method table.
int cmd_report(const CommandArgs& args, std::ostream& out, std::ostream& err);

}  // namespace qpower
