#include <atomic>
#include <mutex>
#include <thread>
#include <algorithm>

#include "taskmapper/cli.hpp"
#include "taskmapper/simkernel.hpp"

namespace taskmapper::cli {

std::vector<metrics::BatchRow> run_batch(const appmodel::ApplicationModel& app,
                                         const platform::PlatformModel& platform,
                                         const mapping::MappingStrategy& strategy,
                                         std::uint64_t first_seed, std::size_t count,
                                         unsigned jobs, bool with_wall_time) {
    std::vector<metrics::BatchRow> rows(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::size_t failed_at = count;
    std::mutex failure_mutex;
    const auto name = strategy.name();

    auto worker = [&] {
        for (;;) {
            const auto i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                const auto seed = first_seed + i;
                const auto m = strategy.produce(app, platform, seed);
                const auto result = simkernel::simulate(app, platform, m, {.record_timeline = false});
                rows[i] = metrics::make_row(seed, seed, name, result, with_wall_time);
            } catch (...) {
                // Report the lowest failing seed so the error does not depend on scheduling.
                std::lock_guard lock(failure_mutex);
                if (i < failed_at) {
                    failed_at = i;
                    failure = std::current_exception();
                }
                return;
            }
        }
    };

    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return rows;
}

} // namespace taskmapper::cli
