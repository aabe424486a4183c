#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "nbody/harness.hpp"
#include "nbody/validation.hpp"

namespace nbody::cli {

enum class Command { Run, Bench, Validate, Report };

std::string_view to_string(Command command);

// Exit codes of the nbody tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown for --help; what() holds the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  Command command = Command::Bench;
  SweepPlan plan;
  std::vector<std::size_t> block_sizes;
  std::optional<std::filesystem::path> out;
  bool resume = false;
  std::optional<std::filesystem::path> config_path;
  std::optional<std::filesystem::path> report_input;
  // Every setting after defaults, config file and flags are merged, in
  // config-file syntax.
  std::map<std::string, std::string> resolved;
};

// argv[0] is the program name, argv[1] the subcommand.
CliConfig parse_args(int argc, const char* const* argv);
CliConfig parse_args(const std::vector<std::string>& args);

// Flat `key = value` lines, `#` comments, comma-separated lists. Keys may use
// '-' or '_'. Throws UsageError naming the line.
std::map<std::string, std::string> parse_config_text(std::string_view text);

// The resolved configuration in config-file syntax.
std::string describe(const CliConfig& config);

// Ladder entries for `validate`: the plan's variants x threads x precisions,
// minus combinations a KernelVariant rejects for the given n.
std::vector<LadderEntry> ladder_entries(const CliConfig& config, std::size_t n);

}  // namespace nbody::cli
