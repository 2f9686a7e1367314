#pragma once

// Deterministic flow-level discrete-event kernel. Hosts and links are
// resources shared max-min fairly between the actions that use them; each
// runnable moves through Waiting -> Reading -> Computing -> Writing -> Done.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "taskmapper/appmodel.hpp"
#include "taskmapper/mapping.hpp"
#include "taskmapper/platform.hpp"
#include "taskmapper/result.hpp"

namespace taskmapper::simkernel {

/// Resource indices used by one action.
using ResourceSet = std::vector<std::size_t>;

/// Max-min fair rates by progressive filling: repeatedly pick the resource
/// with the smallest remaining capacity per unfrozen user, freeze its users
/// at that share and subtract it everywhere they appear. Ties go to the
/// lowest resource index. Every action must use at least one resource
/// (std::invalid_argument otherwise); duplicates within a set count once.
std::vector<double> share_resources(std::span<const double> capacities,
                                    std::span<const ResourceSet> actions);

enum class ProcessState { WaitingActivations, Reading, Computing, Writing, Done };

const char* to_string(ProcessState state);

struct SimulationOptions {
    bool record_timeline = true;
};

class Kernel {
public:
    /// Throws ValidationError/CycleError for a malformed application and
    /// MappingError when the mapping is partial or needs an undeclared route.
    Kernel(const appmodel::ApplicationModel& app, const platform::PlatformModel& platform,
           const mapping::Mapping& mapping, SimulationOptions options = {});
    ~Kernel();
    Kernel(Kernel&&) noexcept;
    Kernel& operator=(Kernel&&) noexcept;
    Kernel(const Kernel&) = delete;
    Kernel& operator=(const Kernel&) = delete;

    /// Moves the clock to the next action completion and performs every
    /// zero-time transition that follows. Returns false, without changing
    /// anything, once every runnable is Done. Throws DeadlockError when live
    /// runnables remain but nothing can progress.
    bool advance();

    bool finished() const;
    double now() const;
    std::size_t live_actions() const;
    ProcessState state(const std::string& runnable) const;

    /// Timeline, utilization, audit and makespan; energy is not attached.
    SimulationResult result() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Runs `app` under `mapping` to completion and attaches energy.
SimulationResult simulate(const appmodel::ApplicationModel& app,
                          const platform::PlatformModel& platform,
                          const mapping::Mapping& mapping, SimulationOptions options = {});

} // namespace taskmapper::simkernel
