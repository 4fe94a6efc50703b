#pragma once

// Command-line front end. Every command reads an ExperimentConfig, writes its
// CSV/JSON outputs into the output directory and a run_metadata.json sidecar
// (the only file carrying a timestamp).

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dispersar/config.hpp"

namespace dispersar::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNumericalError = 3;

struct CommandOptions {
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> data_path;  // synthesized from the config when absent
  std::optional<std::filesystem::path> out_dir;    // overrides config.output_dir
  int threads = 1;
  std::optional<std::uint64_t> seed;               // overrides noise.seed
};

/// Loads the config and applies the command-line overrides.
ExperimentConfig resolve_config(const CommandOptions& options);
std::filesystem::path output_directory(const CommandOptions& options, const ExperimentConfig& config);

void cmd_synthesize(const CommandOptions& options, std::ostream& log);
void cmd_image(const CommandOptions& options, std::ostream& log);
void cmd_zoom(const CommandOptions& options, std::ostream& log);
void cmd_rangeshift(const CommandOptions& options, std::ostream& log);
void cmd_rcs(const CommandOptions& options, std::ostream& log);
void cmd_multircs(const CommandOptions& options, std::ostream& log);

/// Parses arguments, runs one subcommand and maps failures to exit codes
/// (2 configuration or input error, 3 numerical failure).
int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dispersar::cli
