#pragma once

#include <iosfwd>

#include "nbody_cli/cli_config.hpp"

namespace nbody::cli {

// Dispatches a parsed configuration; returns the process exit code.
int execute(const CliConfig& config, std::ostream& out, std::ostream& log);

// parse_args + execute with usage/runtime errors mapped to exit codes.
int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& log);

}  // namespace nbody::cli
