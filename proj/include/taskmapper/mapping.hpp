#pragma once

// Static placement of runnables and labels onto hosts, and the strategies
// that produce it.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "taskmapper/appmodel.hpp"
#include "taskmapper/platform.hpp"

namespace taskmapper::mapping {

struct Mapping {
    std::map<std::string, std::string> runnable_to_host;
    std::map<std::string, std::string> label_to_host;

    friend bool operator==(const Mapping&, const Mapping&) = default;
};

/// Checks totality and host existence. Throws MappingError naming the first
/// unmapped or unknown entity, UnknownHostError for a missing host.
void validate_mapping(const Mapping& mapping, const appmodel::ApplicationModel& app,
                      const platform::PlatformModel& platform);

struct StrategyOptions {
    /// Built-in strategies skip the frontend host unless this is set.
    bool allow_frontend = false;
};

/// User-extensible mapping algorithm. `produce` must be a pure function of
/// its arguments.
class MappingStrategy {
public:
    virtual ~MappingStrategy() = default;
    virtual std::string name() const = 0;
    virtual Mapping produce(const appmodel::ApplicationModel& app,
                            const platform::PlatformModel& platform, std::uint64_t seed) const = 0;
};

/// Uniform independent placement. Draws come from std::mt19937_64 seeded with
/// `seed`; a host index in [0, n) is taken from the first draw x with
/// x >= 2^64 mod n, as x mod n. Runnables are placed first in sorted id
/// order, then labels in sorted name order.
Mapping map_random(const appmodel::ApplicationModel& app, const platform::PlatformModel& platform,
                   std::uint64_t seed, const StrategyOptions& options = {});

/// Runnables in sorted id order dealt cyclically over eligible hosts in file
/// order; labels follow their first writer (else first reader).
Mapping map_round_robin(const appmodel::ApplicationModel& app,
                        const platform::PlatformModel& platform,
                        const StrategyOptions& options = {});

/// Everything on `host_id`. Throws UnknownHostError.
Mapping map_all_on(const appmodel::ApplicationModel& app, const platform::PlatformModel& platform,
                   const std::string& host_id);

/// Longest-work-first list placement onto the host with the earliest
/// resulting finish (load + work) / speed; ties go to the earlier host in
/// file order. Labels as in round robin.
Mapping map_greedy_load(const appmodel::ApplicationModel& app,
                        const platform::PlatformModel& platform,
                        const StrategyOptions& options = {});

/// Places every label on the host of its lexicographically-first writer,
/// falling back to the first reader, then to `fallback_host`.
void colocate_labels(Mapping& mapping, const appmodel::ApplicationModel& app,
                     const std::string& fallback_host);

Mapping parse_mapping(const std::filesystem::path& path);
Mapping parse_mapping_text(const std::string& text);
/// Parses and checks totality against the given application and platform.
Mapping load_mapping(const std::filesystem::path& path, const appmodel::ApplicationModel& app,
                     const platform::PlatformModel& platform);
std::string serialize_mapping(const Mapping& mapping);
void serialize_mapping(const Mapping& mapping, const std::filesystem::path& path);

/// Builds a strategy from its CLI name: `random`, `round-robin`,
/// `all-on:<host>`, `greedy-load` or `file:<path>`. Throws ArgumentError.
std::unique_ptr<MappingStrategy> make_strategy(const std::string& spec,
                                               const StrategyOptions& options = {});

} // namespace taskmapper::mapping
