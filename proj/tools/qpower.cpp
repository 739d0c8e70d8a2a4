// qpower: simulate, characterize and calibrate a two-level absolute power sensor.

#include <iostream>

#include "CLI11.hpp"
#include "qpower/commands.hpp"
#include "qpower/series.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Absolute microwave power calibration with a two-level sensor"};
  app.require_subcommand(1);

  qpower::CommandArgs args;
  std::string method;
  std::uint64_t seed = 0;
  const std::string methods = "{" + qpower::valid_method_list() + "}";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config, "Run configuration file");
    sub->add_option("--method", method, "Measurement method " + methods);
    sub->add_option("--seed", seed, "Override the configured random seed");
    sub->add_option("--out", args.out, "Output directory");
  };

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic dataset and manifest");
  add_common(simulate);
  simulate->get_option("--config")->required();

  auto* characterize = app.add_subcommand("characterize", "Fit the weak-drive lineshapes of a dataset");
  add_common(characterize);
  characterize->add_option("--data", args.data, "Dataset directory")->required();

  auto* calibrate = app.add_subcommand("calibrate", "Run a method pipeline on a dataset");
  add_common(calibrate);
  calibrate->get_option("--config")->required();
  calibrate->add_option("--data", args.data, "Dataset directory")->required();

  auto* report = app.add_subcommand("report", "Compare calibration reports across methods");
  report->add_option("reports", args.reports, "report.json files")->required();
  report->add_option("--out", args.out, "Directory for comparison.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : qpower::kExitConfig;
  }

  for (auto* sub : {simulate, characterize, calibrate}) {
    if (!sub->parsed()) continue;
    if (sub->count("--method")) args.method = method;
    if (sub->count("--seed")) args.seed = seed;
  }

  if (simulate->parsed()) return qpower::cmd_simulate(args, std::cout, std::cerr);
  if (characterize->parsed()) return qpower::cmd_characterize(args, std::cout, std::cerr);
  if (calibrate->parsed()) return qpower::cmd_calibrate(args, std::cout, std::cerr);
  return qpower::cmd_report(args, std::cout, std::cerr);
}
