#pragma once

#include <string>
#include <vector>

#include "evoq/config.hpp"

namespace evoq {

// Exit statuses of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfigError = 1,    // invalid configuration or domain error
    kExitNotConverged = 2,   // numerical non-convergence; partial output kept
    kExitUsage = 64,         // unknown subcommand or malformed flags
};

const std::vector<std::string>& subcommands();

// Runs one subcommand on a validated config, writing the CSV at config.output
// and its metadata sidecar. Returns an ExitCode.
int dispatch(const std::string& subcommand, const SimulationConfig& config);

// Full command-line entry point (argument parsing, config loading, dispatch).
int run_cli(int argc, const char* const* argv);

} // namespace evoq
