#pragma once

// Energy integration and batch result tables.

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "taskmapper/platform.hpp"
#include "taskmapper/result.hpp"

namespace taskmapper::metrics {

/// Joules per host (platform order): sum of power_at(u) * duration over each
/// host's intervals, with the uncovered remainder of [0, makespan] counted
/// at idle power. Throws DomainError for negative durations or utilizations
/// outside [0, 1].
std::vector<double> integrate_energy(
    const std::vector<std::vector<UtilizationInterval>>& per_host,
    const platform::PlatformModel& platform, double makespan);

/// Fills per_host_energy and total_energy of `result` from its utilization
/// series.
void attach_energy(SimulationResult& result, const platform::PlatformModel& platform);

struct BatchRow {
    std::uint64_t mapping_id = 0;
    std::uint64_t seed = 0;
    std::string strategy;
    double makespan = 0.0;
    double total_energy = 0.0;
    std::optional<double> sim_wall_ms;
    std::vector<double> host_energy; // platform order

    friend bool operator==(const BatchRow&, const BatchRow&) = default;
};

BatchRow make_row(std::uint64_t mapping_id, std::uint64_t seed, std::string strategy,
                  const SimulationResult& result, bool with_wall_time);

struct ColumnStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    std::uint64_t argmin = 0; // mapping id, first row wins ties
    std::uint64_t argmax = 0;
};

struct BatchSummary {
    std::size_t rows = 0;
    ColumnStats makespan;
    ColumnStats energy;
    std::optional<ColumnStats> wall_ms; // only when every row has a wall time
};

/// Throws EmptyBatchError.
BatchSummary summarize_batch(std::span<const BatchRow> rows);

/// `value` in plain decimal notation with exactly `digits` significant digits.
std::string format_significant(double value, int digits = 9);

std::string csv_header(const platform::PlatformModel& platform);
void write_csv_row(std::ostream& out, const BatchRow& row);
/// `# key=value` comment lines summarizing the batch.
void write_summary_comments(std::ostream& out, const BatchSummary& summary);

/// Header, rows in the given order, then the summary block.
void write_batch_csv(std::ostream& out, const platform::PlatformModel& platform,
                     std::span<const BatchRow> rows, bool with_summary);

} // namespace taskmapper::metrics
