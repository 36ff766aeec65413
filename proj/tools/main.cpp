#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace ipmdro::cli;
  CLI::App app{"Integral-probability-metric balls: penalties, worst cases and bounds"};
  app.require_subcommand(1);
  RunOptions options;
  std::string config_path;
  std::uint64_t seed = 0;
  double tol = 0.0;
  for (const std::string& name : subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON problem configuration")
        ->check(CLI::ExistingFile)
        ->required(name != "repro-sin");
    sub->add_option("--out", options.out_dir, "Directory for the CSV and JSON reports")->required();
    sub->add_option("--seed", seed, "Overrides the configuration seed");
    sub->add_option("--tol", tol, "Pass threshold for residual and slack columns")->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }
  CLI::App* chosen = app.get_subcommands().front();
  if (!config_path.empty()) options.config_path = config_path;
  if (chosen->count("--seed") > 0) options.seed = seed;
  if (chosen->count("--tol") > 0) options.tol = tol;
  return run(chosen->get_name(), options, std::cerr);
}
