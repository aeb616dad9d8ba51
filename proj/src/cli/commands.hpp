#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace harnack::cli {

const std::vector<std::string>& command_names();

/// Runs one subcommand, writing artifacts and a manifest under config.output.
/// Returns 0 when every verdict passes and 1 otherwise; errors throw.
int run_command(const std::string& name, const Config& config, std::ostream& log);

}  // namespace harnack::cli
