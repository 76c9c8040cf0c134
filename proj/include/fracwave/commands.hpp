#pragma once

#include <string>

#include <json.hpp>

#include "fracwave/config.hpp"

namespace fracwave::commands {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
  kValidationFailure = 4,
};

/// version, config hash and the canonical key/value record.
nlohmann::ordered_json provenance(const config::RunConfig& cfg);

// Each command writes into cfg.out_dir and returns an exit code; errors
// propagate as exceptions.
int cmd_simulate(const config::RunConfig& cfg);
int cmd_spectrum(const config::RunConfig& cfg);
int cmd_errors(const config::RunConfig& cfg);
int cmd_hoelder(const config::RunConfig& cfg);
int cmd_validate(const config::RunConfig& cfg);

/// Validates cfg, dispatches by name and maps exceptions to exit codes,
/// printing a diagnostic to stderr.
int run(const std::string& command, const config::RunConfig& cfg);

}  // namespace fracwave::commands
