#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ddflow/config.hpp"

namespace ddflow {

/// solve-state | optimize | check-gradient | check-adjoint | check-ssc | mms-convergence
std::vector<std::string> command_names();

/// Runs one command, writing fields_*.vtk, history.csv (plus command-specific
/// CSVs) and report.txt into `out_dir` (created if missing). Returns 0 on
/// success, 1 if a check fails or the optimizer stalls. Module errors
/// propagate as exceptions.
int run_command(const std::string& command, const RunConfig& config, const std::filesystem::path& out_dir,
                std::ostream& log);

}  // namespace ddflow
