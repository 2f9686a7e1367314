#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace taskmapper::simkernel::detail {

/// Scratch buffers reused across calls.
struct FillWorkspace {
    std::vector<double> remaining;
    std::vector<std::size_t> users;
    std::vector<std::vector<std::size_t>> members;
    std::vector<std::size_t> stamp;
    std::vector<char> frozen;
};

/// Progressive filling over `action_count` actions. `resources_of(i)` yields a
/// range of resource indices (duplicates allowed, counted once). Writes one
/// rate per action into `rates`; actions without resources get 0.
template <class ResourcesOf>
void progressive_fill(std::span<const double> capacities, std::size_t action_count,
                      ResourcesOf&& resources_of, std::vector<double>& rates,
                      FillWorkspace& ws) {
    constexpr auto none = std::numeric_limits<std::size_t>::max();
    const auto nres = capacities.size();
    ws.remaining.assign(capacities.begin(), capacities.end());
    ws.users.assign(nres, 0);
    ws.stamp.assign(nres, none);
    if (ws.members.size() < nres) {
        ws.members.resize(nres);
    }
    for (std::size_t r = 0; r < nres; ++r) {
        ws.members[r].clear();
    }
    for (std::size_t a = 0; a < action_count; ++a) {
        for (auto r : resources_of(a)) {
            if (ws.stamp[r] != a) {
                ws.stamp[r] = a;
                ws.members[r].push_back(a);
                ++ws.users[r];
            }
        }
    }
    rates.assign(action_count, 0.0);
    ws.frozen.assign(action_count, 0);
    ws.stamp.assign(nres, none);

    for (;;) {
        std::size_t bottleneck = nres;
        double share = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < nres; ++r) {
            if (ws.users[r] == 0) {
                continue;
            }
            const double s = std::max(0.0, ws.remaining[r]) / static_cast<double>(ws.users[r]);
            if (s < share) {
                share = s;
                bottleneck = r;
            }
        }
        if (bottleneck == nres) {
            return;
        }
        for (auto a : ws.members[bottleneck]) {
            if (ws.frozen[a]) {
                continue;
            }
            ws.frozen[a] = 1;
            rates[a] = share;
            for (auto r : resources_of(a)) {
                if (ws.stamp[r] != a) {
                    ws.stamp[r] = a;
                    ws.remaining[r] -= share;
                    --ws.users[r];
                }
            }
        }
        ws.remaining[bottleneck] = 0.0;
    }
}

} // namespace taskmapper::simkernel::detail
