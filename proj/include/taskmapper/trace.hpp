#pragma once

// Paje timeline traces (viewable with ViTE): one container per host and per
// runnable, runnable phase states, dependency and label-transfer links.

#include <filesystem>
#include <ostream>
#include <string>

#include "taskmapper/mapping.hpp"
#include "taskmapper/platform.hpp"
#include "taskmapper/result.hpp"

namespace taskmapper::trace {

/// The %EventDef block every trace starts with.
const std::string& paje_header();

/// Writes the trace of `result` (which must carry a timeline). Events are
/// ordered by timestamp, then by generation order; times use 9 decimals.
void emit_paje(const SimulationResult& result, const platform::PlatformModel& platform,
               const mapping::Mapping& mapping, std::ostream& out);

/// Throws IoError when the file cannot be written.
void emit_paje(const SimulationResult& result, const platform::PlatformModel& platform,
               const mapping::Mapping& mapping, const std::filesystem::path& path);

} // namespace taskmapper::trace
