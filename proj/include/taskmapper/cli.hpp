#pragma once

// Command-line front end: validate / simulate / batch / generate.

#include <cstdint>
#include <exception>
#include <ostream>
#include <string>
#include <vector>

#include "taskmapper/appmodel.hpp"
#include "taskmapper/mapping.hpp"
#include "taskmapper/metrics.hpp"
#include "taskmapper/platform.hpp"

namespace taskmapper::cli {

enum ExitCode : int { Ok = 0, IoFailure = 1, ValidationFailure = 2, SimulationFailure = 3 };

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

/// Simulates seeds first_seed .. first_seed + count - 1 on `jobs` threads.
/// Rows come back in seed order whatever the thread count; the seed doubles
/// as the mapping id.
std::vector<metrics::BatchRow> run_batch(const appmodel::ApplicationModel& app,
                                         const platform::PlatformModel& platform,
                                         const mapping::MappingStrategy& strategy,
                                         std::uint64_t first_seed, std::size_t count,
                                         unsigned jobs, bool with_wall_time);

/// Runs the CLI on `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace taskmapper::cli
