#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aglab/config.hpp"

namespace aglab {

enum ExitCode { kExitOk = 0, kExitFailure = 1, kExitNotConverged = 2, kExitConfig = 3 };

const std::vector<std::string>& subcommands();

/// Runs one pipeline and writes its files into cfg.output_dir(); returns kExitOk or kExitNotConverged.
/// Every table carries a "# config_hash=... seed=..." first line and every JSON file the same two fields.
int run_pipeline(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log);

/// load_config + run_pipeline with the exit-code mapping (config errors give kExitConfig).
int run(const std::string& subcommand, const std::string& config_path, std::ostream& log, std::ostream& err);

}  // namespace aglab
