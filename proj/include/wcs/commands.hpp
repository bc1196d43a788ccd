#ifndef WCS_COMMANDS_HPP
#define WCS_COMMANDS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "wcs/core.hpp"

namespace wcs {

inline constexpr int kReportSchemaVersion = 1;

struct CommandOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<Index> workers;         ///< default: available parallelism
  std::optional<std::uint64_t> seed;    ///< overrides the config "seed"
  std::filesystem::path base_dir = "."; ///< relative paths in the config resolve here
};

/// exit_code: 0 satisfied / converged / all checks pass, 2 violated /
/// not converged / some check failed, 1 error (including an exhausted
/// experiment time budget, which still writes partial output).
struct CommandResult {
  int exit_code = 0;
  std::string json;     ///< report document
  std::string message;  ///< human-readable note for stderr, may be empty
};

/// Runs certify | recover | construct | experiment on a JSON config text.
/// Throws wcs::Error on invalid input.
CommandResult run_command(std::string_view command, const std::string& config_text, const CommandOptions& opts);

/// Same, reading the config from a file; base_dir defaults to its directory.
CommandResult run_command_file(std::string_view command, const std::filesystem::path& config, CommandOptions opts);

}  // namespace wcs

#endif  // WCS_COMMANDS_HPP
