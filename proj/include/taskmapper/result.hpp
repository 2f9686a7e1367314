#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace taskmapper {

enum class Phase { Waiting, Reading, Computing, Writing };
enum class TransferKind { Read, Write, Activation };
enum class EventKind { PhaseEnter, PhaseExit, TransferStart, TransferEnd };

const char* to_string(Phase phase);
const char* to_string(TransferKind kind);
const char* to_string(EventKind kind);

struct TimelineEvent {
    double time = 0.0;
    EventKind kind = EventKind::PhaseEnter;
    std::string runnable;
    std::string host; // host of `runnable`

    // Phase events.
    Phase phase = Phase::Waiting;

    // Transfer events.
    TransferKind transfer = TransferKind::Read;
    std::uint64_t transfer_id = 0;
    std::string label;       // Read / Write
    std::string successor;   // Activation target runnable
    std::string src_host;
    std::string dst_host;

    friend bool operator==(const TimelineEvent&, const TimelineEvent&) = default;
};

/// One stretch of constant host utilization.
struct UtilizationInterval {
    double duration = 0.0;
    double utilization = 0.0;

    friend bool operator==(const UtilizationInterval&, const UtilizationInterval&) = default;
};

/// Kernel self-checks collected while simulating.
struct KernelAudit {
    std::size_t steps = 0;
    std::size_t completed_actions = 0;
    /// max |integrated amount - requested amount| / requested amount.
    double max_conservation_error = 0.0;
    /// max (sum of rates on a resource - capacity) / capacity, floored at 0.
    double max_oversubscription = 0.0;
};

/// When a runnable became ready (all activations received) and when it
/// reached Done.
struct RunnableSpan {
    std::string runnable;
    std::string host;
    double ready = 0.0;
    double finish = 0.0;

    friend bool operator==(const RunnableSpan&, const RunnableSpan&) = default;
};

struct HostEnergy {
    std::string host;
    double joules = 0.0;

    friend bool operator==(const HostEnergy&, const HostEnergy&) = default;
};

struct SimulationResult {
    double makespan = 0.0;
    std::vector<HostEnergy> per_host_energy; // platform file order
    double total_energy = 0.0;
    std::vector<TimelineEvent> timeline;
    std::vector<RunnableSpan> spans; // sorted by runnable id
    /// Per host, platform file order; covers [0, makespan] up to idle tails.
    std::vector<std::vector<UtilizationInterval>> utilization;
    KernelAudit audit;
    /// Wall-clock seconds spent in the kernel (measured, not simulated).
    double sim_wall_time = 0.0;
};

} // namespace taskmapper
