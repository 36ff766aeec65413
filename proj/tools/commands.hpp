#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "report.hpp"

namespace ipmdro::cli {

struct RunOptions {
  std::optional<std::string> config_path;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  /// Pass threshold for residual and slack columns; path-dependent default.
  std::optional<double> tol;
};

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3 };

const std::vector<std::string>& subcommand_names();

/// Grid of 201 points on [-4, 4], discretized standard normal, h = sin 2t + t, eps = 1.
ProblemConfig builtin_sin_config();

/// Runs a subcommand on an already parsed configuration.
Report run_subcommand(const std::string& name, const ProblemConfig& config, const RunOptions& options);

/// Loads the configuration, runs, writes the report and maps failures onto
/// exit codes. Diagnostics go to `err`.
int run(const std::string& name, const RunOptions& options, std::ostream& err);

}  // namespace ipmdro::cli
