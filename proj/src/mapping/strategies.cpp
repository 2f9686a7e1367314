#include "taskmapper/mapping.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "taskmapper/error.hpp"

namespace taskmapper::mapping {

using appmodel::ApplicationModel;
using platform::PlatformModel;

namespace {

std::vector<std::size_t> eligible_or_throw(const PlatformModel& platform,
                                           const StrategyOptions& options) {
    auto hosts = platform::eligible_hosts(platform, options.allow_frontend);
    if (hosts.empty()) {
        throw EmptyPlatformError();
    }
    return hosts;
}

std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    // 2^64 mod n, computed in 64-bit arithmetic.
    const std::uint64_t threshold = (std::uint64_t{0} - n) % n;
    for (;;) {
        const std::uint64_t x = rng();
        if (x >= threshold) {
            return x % n;
        }
    }
}

} // namespace

void validate_mapping(const Mapping& mapping, const ApplicationModel& app,
                      const PlatformModel& platform) {
    auto check_host = [&](const std::string& host) {
        if (!platform.find_host(host)) {
            throw UnknownHostError(host);
        }
    };
    for (const auto& id : app.runnable_ids()) {
        auto it = mapping.runnable_to_host.find(id);
        if (it == mapping.runnable_to_host.end()) {
            throw MappingError(id, "runnable '" + id + "' is not mapped");
        }
        check_host(it->second);
    }
    for (const auto& name : app.label_names()) {
        auto it = mapping.label_to_host.find(name);
        if (it == mapping.label_to_host.end()) {
            throw MappingError(name, "label '" + name + "' is not mapped");
        }
        check_host(it->second);
    }
    for (const auto& [id, host] : mapping.runnable_to_host) {
        if (!app.find_runnable(id)) {
            throw MappingError(id, "mapping names unknown runnable '" + id + "'");
        }
    }
    for (const auto& [name, host] : mapping.label_to_host) {
        if (!app.find_label(name)) {
            throw MappingError(name, "mapping names unknown label '" + name + "'");
        }
    }
}

Mapping map_random(const ApplicationModel& app, const PlatformModel& platform, std::uint64_t seed,
                   const StrategyOptions& options) {
    const auto hosts = eligible_or_throw(platform, options);
    std::mt19937_64 rng(seed);
    Mapping m;
    for (const auto& id : app.runnable_ids()) {
        m.runnable_to_host[id] = platform.hosts()[hosts[uniform_index(rng, hosts.size())]].id;
    }
    for (const auto& name : app.label_names()) {
        m.label_to_host[name] = platform.hosts()[hosts[uniform_index(rng, hosts.size())]].id;
    }
    return m;
}

void colocate_labels(Mapping& mapping, const ApplicationModel& app,
                     const std::string& fallback_host) {
    std::map<std::string, std::string> first_writer;
    std::map<std::string, std::string> first_reader;
    for (const auto& t : app.tasks) {
        for (const auto& r : t.runnables) {
            for (const auto& ins : r.instructions) {
                std::map<std::string, std::string>* slot = nullptr;
                const std::string* label = nullptr;
                if (const auto* w = std::get_if<appmodel::WriteAccess>(&ins)) {
                    slot = &first_writer;
                    label = &w->label;
                } else if (const auto* rd = std::get_if<appmodel::ReadAccess>(&ins)) {
                    slot = &first_reader;
                    label = &rd->label;
                } else {
                    continue;
                }
                auto [it, inserted] = slot->emplace(*label, r.id);
                if (!inserted && r.id < it->second) {
                    it->second = r.id;
                }
            }
        }
    }
    for (const auto& l : app.labels) {
        std::string host = fallback_host;
        if (auto w = first_writer.find(l.name); w != first_writer.end()) {
            host = mapping.runnable_to_host.at(w->second);
        } else if (auto r = first_reader.find(l.name); r != first_reader.end()) {
            host = mapping.runnable_to_host.at(r->second);
        }
        mapping.label_to_host[l.name] = host;
    }
}

Mapping map_round_robin(const ApplicationModel& app, const PlatformModel& platform,
                        const StrategyOptions& options) {
    const auto hosts = eligible_or_throw(platform, options);
    Mapping m;
    std::size_t next = 0;
    for (const auto& id : app.runnable_ids()) {
        m.runnable_to_host[id] = platform.hosts()[hosts[next]].id;
        next = (next + 1) % hosts.size();
    }
    colocate_labels(m, app, platform.hosts()[hosts.front()].id);
    return m;
}

Mapping map_all_on(const ApplicationModel& app, const PlatformModel& platform,
                   const std::string& host_id) {
    platform.host_index(host_id);
    Mapping m;
    for (const auto& id : app.runnable_ids()) {
        m.runnable_to_host[id] = host_id;
    }
    for (const auto& name : app.label_names()) {
        m.label_to_host[name] = host_id;
    }
    return m;
}

Mapping map_greedy_load(const ApplicationModel& app, const PlatformModel& platform,
                        const StrategyOptions& options) {
    const auto hosts = eligible_or_throw(platform, options);

    struct Item {
        std::string id;
        double work;
    };
    std::vector<Item> items;
    for (const auto& t : app.tasks) {
        for (const auto& r : t.runnables) {
            items.push_back({r.id, appmodel::compute_work(r)});
        }
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.work != b.work) {
            return a.work > b.work;
        }
        return a.id < b.id;
    });

    std::vector<double> load(hosts.size(), 0.0);
    Mapping m;
    for (const auto& item : items) {
        std::size_t best = 0;
        double best_finish = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < hosts.size(); ++k) {
            const double finish = (load[k] + item.work) / platform.hosts()[hosts[k]].speed;
            if (finish < best_finish) {
                best_finish = finish;
                best = k;
            }
        }
        load[best] += item.work;
        m.runnable_to_host[item.id] = platform.hosts()[hosts[best]].id;
    }
    colocate_labels(m, app, platform.hosts()[hosts.front()].id);
    return m;
}

namespace {

class RandomStrategy final : public MappingStrategy {
public:
    explicit RandomStrategy(StrategyOptions options) : options_(options) {}
    std::string name() const override { return "random"; }
    Mapping produce(const ApplicationModel& app, const PlatformModel& platform,
                    std::uint64_t seed) const override {
        return map_random(app, platform, seed, options_);
    }

private:
    StrategyOptions options_;
};

class RoundRobinStrategy final : public MappingStrategy {
public:
    explicit RoundRobinStrategy(StrategyOptions options) : options_(options) {}
    std::string name() const override { return "round-robin"; }
    Mapping produce(const ApplicationModel& app, const PlatformModel& platform,
                    std::uint64_t) const override {
        return map_round_robin(app, platform, options_);
    }

private:
    StrategyOptions options_;
};

class GreedyLoadStrategy final : public MappingStrategy {
public:
    explicit GreedyLoadStrategy(StrategyOptions options) : options_(options) {}
    std::string name() const override { return "greedy-load"; }
    Mapping produce(const ApplicationModel& app, const PlatformModel& platform,
                    std::uint64_t) const override {
        return map_greedy_load(app, platform, options_);
    }

private:
    StrategyOptions options_;
};

class AllOnStrategy final : public MappingStrategy {
public:
    explicit AllOnStrategy(std::string host) : host_(std::move(host)) {}
    std::string name() const override { return "all-on:" + host_; }
    Mapping produce(const ApplicationModel& app, const PlatformModel& platform,
                    std::uint64_t) const override {
        return map_all_on(app, platform, host_);
    }

private:
    std::string host_;
};

class FileStrategy final : public MappingStrategy {
public:
    explicit FileStrategy(std::filesystem::path path) : path_(std::move(path)) {}
    std::string name() const override { return "file:" + path_.string(); }
    Mapping produce(const ApplicationModel& app, const PlatformModel& platform,
                    std::uint64_t) const override {
        return load_mapping(path_, app, platform);
    }

private:
    std::filesystem::path path_;
};

} // namespace

std::unique_ptr<MappingStrategy> make_strategy(const std::string& spec,
                                               const StrategyOptions& options) {
    if (spec == "random") {
        return std::make_unique<RandomStrategy>(options);
    }
    if (spec == "round-robin") {
        return std::make_unique<RoundRobinStrategy>(options);
    }
    if (spec == "greedy-load") {
        return std::make_unique<GreedyLoadStrategy>(options);
    }
    if (spec.rfind("all-on:", 0) == 0 && spec.size() > 7) {
        return std::make_unique<AllOnStrategy>(spec.substr(7));
    }
    if (spec.rfind("file:", 0) == 0 && spec.size() > 5) {
        return std::make_unique<FileStrategy>(spec.substr(5));
    }
    throw ArgumentError("unknown mapping strategy '" + spec +
                        "' (expected random, round-robin, all-on:<host>, greedy-load or "
                        "file:<path>)");
}

} // namespace taskmapper::mapping
