#pragma once

#include "cli_support.hpp"

namespace floquet::cli {

/// Registers every subcommand on `app`. The selected one runs from
/// run_selected() after parsing.
void register_commands(CLI::App& app);

/// Runs the subcommand chosen on the command line.
void run_selected(const CLI::App& app);

}  // namespace floquet::cli
