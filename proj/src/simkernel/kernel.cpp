#include "taskmapper/simkernel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <unordered_map>

#include "simkernel/progressive_filling.hpp"
#include "taskmapper/error.hpp"
#include "taskmapper/metrics.hpp"

namespace taskmapper::simkernel {

const char* to_string(ProcessState state) {
    switch (state) {
    case ProcessState::WaitingActivations: return "WaitingActivations";
    case ProcessState::Reading: return "Reading";
    case ProcessState::Computing: return "Computing";
    case ProcessState::Writing: return "Writing";
    case ProcessState::Done: return "Done";
    }
    return "?";
}

namespace {

// Completion order among simultaneous completions of one runnable.
enum class ActionOrder { Read = 0, Compute = 1, Write = 2, Activation = 3 };

struct Action {
    std::uint64_t id = 0;
    std::size_t owner = 0;
    ActionOrder order = ActionOrder::Compute;
    std::size_t target = 0; // label index, or successor runnable for activations
    std::size_t src = 0;
    std::size_t dst = 0;
    ResourceSet resources;
    double amount = 0.0;
    double remaining = 0.0;
    double latency_remaining = 0.0;
    double integrated = 0.0;
    double rate = 0.0;
};

struct Process {
    ProcessState state = ProcessState::WaitingActivations;
    std::size_t pending_activations = 0;
    std::size_t pending = 0; // transfers or compute of the current phase
    bool waited = false;
};

struct Work {
    std::vector<std::size_t> reads;
    double compute = 0.0;
    std::vector<std::size_t> writes;
};

TransferKind transfer_kind(ActionOrder o) {
    switch (o) {
    case ActionOrder::Read: return TransferKind::Read;
    case ActionOrder::Write: return TransferKind::Write;
    default: return TransferKind::Activation;
    }
}

} // namespace

struct Kernel::Impl {
    SimulationOptions options;
    platform::PlatformModel platform;
    appmodel::RunnableGraph graph;
    std::vector<std::string> label_names;
    std::vector<double> label_bytes;
    std::vector<std::size_t> label_host;
    std::vector<std::size_t> runnable_host;
    std::vector<Work> work;
    std::vector<double> capacities; // hosts, then links
    std::vector<double> route_latency; // host x host

    double now = 0.0;
    double makespan = 0.0;
    std::vector<Process> procs;
    std::vector<Action> actions;
    std::deque<std::size_t> worklist;
    std::uint64_t next_id = 0;
    std::size_t done = 0;

    std::vector<TimelineEvent> timeline;
    std::vector<RunnableSpan> spans;
    std::vector<std::vector<UtilizationInterval>> utilization;
    KernelAudit audit;

    detail::FillWorkspace fill_ws;
    std::vector<double> rates;
    std::vector<std::size_t> sharing; // indices of actions past their latency

    std::size_t hosts() const { return platform.hosts().size(); }
    const std::string& host_id(std::size_t h) const { return platform.hosts()[h].id; }

    void record_phase(EventKind kind, std::size_t r, Phase phase) {
        if (!options.record_timeline) {
            return;
        }
        TimelineEvent e;
        e.time = now;
        e.kind = kind;
        e.runnable = graph.ids[r];
        e.host = host_id(runnable_host[r]);
        e.phase = phase;
        timeline.push_back(std::move(e));
    }

    void record_transfer(EventKind kind, const Action& a) {
        if (!options.record_timeline) {
            return;
        }
        TimelineEvent e;
        e.time = now;
        e.kind = kind;
        e.runnable = graph.ids[a.owner];
        e.host = host_id(runnable_host[a.owner]);
        e.transfer = transfer_kind(a.order);
        e.transfer_id = a.id;
        if (a.order == ActionOrder::Activation) {
            e.successor = graph.ids[a.target];
        } else {
            e.label = label_names[a.target];
        }
        e.src_host = host_id(a.src);
        e.dst_host = host_id(a.dst);
        timeline.push_back(std::move(e));
    }

    void deliver_activation(std::size_t succ) {
        auto& p = procs[succ];
        --p.pending_activations;
        if (p.pending_activations == 0) {
            worklist.push_back(succ);
        }
    }

    // Returns true when the transfer stays live and must be waited for.
    bool issue_transfer(std::size_t owner, ActionOrder order, std::size_t target, std::size_t src,
                        std::size_t dst, double bytes) {
        Action a;
        a.id = next_id++;
        a.owner = owner;
        a.order = order;
        a.target = target;
        a.src = src;
        a.dst = dst;
        a.amount = bytes;
        a.remaining = bytes;
        const auto& path = platform.route_links(src, dst);
        const double latency = route_latency[src * hosts() + dst];
        const bool instant = src == dst || path.empty() || (bytes <= 0.0 && latency <= 0.0);
        record_transfer(EventKind::TransferStart, a);
        if (instant) {
            record_transfer(EventKind::TransferEnd, a);
            if (order == ActionOrder::Activation) {
                deliver_activation(target);
            }
            return false;
        }
        a.latency_remaining = latency;
        for (auto l : path) {
            a.resources.push_back(hosts() + l);
        }
        actions.push_back(std::move(a));
        return true;
    }

    void start_compute(std::size_t r) {
        Action a;
        a.id = next_id++;
        a.owner = r;
        a.order = ActionOrder::Compute;
        a.src = a.dst = runnable_host[r];
        a.amount = a.remaining = work[r].compute;
        a.resources.push_back(runnable_host[r]);
        actions.push_back(std::move(a));
    }

    void step_process(std::size_t r) {
        const auto& w = work[r];
        const auto host = runnable_host[r];
        for (;;) {
            auto& p = procs[r];
            switch (p.state) {
            case ProcessState::WaitingActivations:
                if (p.pending_activations > 0) {
                    return;
                }
                if (p.waited) {
                    record_phase(EventKind::PhaseExit, r, Phase::Waiting);
                }
                spans[r].ready = now;
                p.state = ProcessState::Reading;
                p.pending = 0;
                if (!w.reads.empty()) {
                    record_phase(EventKind::PhaseEnter, r, Phase::Reading);
                    for (auto l : w.reads) {
                        if (issue_transfer(r, ActionOrder::Read, l, label_host[l], host,
                                           label_bytes[l])) {
                            ++p.pending;
                        }
                    }
                }
                break;
            case ProcessState::Reading:
                if (p.pending > 0) {
                    return;
                }
                if (!w.reads.empty()) {
                    record_phase(EventKind::PhaseExit, r, Phase::Reading);
                }
                p.state = ProcessState::Computing;
                if (w.compute > 0.0) {
                    record_phase(EventKind::PhaseEnter, r, Phase::Computing);
                    start_compute(r);
                    p.pending = 1;
                }
                break;
            case ProcessState::Computing:
                if (p.pending > 0) {
                    return;
                }
                if (w.compute > 0.0) {
                    record_phase(EventKind::PhaseExit, r, Phase::Computing);
                }
                p.state = ProcessState::Writing;
                if (!w.writes.empty()) {
                    record_phase(EventKind::PhaseEnter, r, Phase::Writing);
                    for (auto l : w.writes) {
                        if (issue_transfer(r, ActionOrder::Write, l, host, label_host[l],
                                           label_bytes[l])) {
                            ++p.pending;
                        }
                    }
                }
                break;
            case ProcessState::Writing:
                if (p.pending > 0) {
                    return;
                }
                if (!w.writes.empty()) {
                    record_phase(EventKind::PhaseExit, r, Phase::Writing);
                }
                p.state = ProcessState::Done;
                spans[r].finish = now;
                makespan = std::max(makespan, now);
                ++done;
                for (auto s : graph.successors[r]) {
                    issue_transfer(r, ActionOrder::Activation, s, host, runnable_host[s], 0.0);
                }
                return;
            case ProcessState::Done:
                return;
            }
        }
    }

    void drain() {
        while (!worklist.empty()) {
            const auto r = worklist.front();
            worklist.pop_front();
            step_process(r);
        }
    }

    void complete(const Action& a) {
        if (a.order != ActionOrder::Compute) {
            record_transfer(EventKind::TransferEnd, a);
        }
        if (a.order == ActionOrder::Activation) {
            deliver_activation(a.target);
            return;
        }
        auto& p = procs[a.owner];
        --p.pending;
        if (p.pending == 0) {
            worklist.push_back(a.owner);
        }
    }

    void record_utilization(double dt) {
        std::vector<double> busy(hosts(), 0.0);
        for (auto i : sharing) {
            const auto& a = actions[i];
            if (a.order == ActionOrder::Compute) {
                busy[a.src] += a.rate;
            }
        }
        for (std::size_t h = 0; h < hosts(); ++h) {
            const double u = std::min(1.0, busy[h] / capacities[h]);
            auto& series = utilization[h];
            if (!series.empty() && series.back().utilization == u) {
                series.back().duration += dt;
            } else {
                series.push_back({dt, u});
            }
        }
    }

    void audit_capacity() {
        std::vector<double> load(capacities.size(), 0.0);
        for (auto i : sharing) {
            const auto& a = actions[i];
            // Distinct resources only, matching the sharing model.
            for (std::size_t k = 0; k < a.resources.size(); ++k) {
                const auto r = a.resources[k];
                if (std::find(a.resources.begin(), a.resources.begin() + static_cast<long>(k), r) ==
                    a.resources.begin() + static_cast<long>(k)) {
                    load[r] += a.rate;
                }
            }
        }
        for (std::size_t r = 0; r < capacities.size(); ++r) {
            const double over = (load[r] - capacities[r]) / capacities[r];
            audit.max_oversubscription = std::max(audit.max_oversubscription, over);
        }
    }

    bool advance() {
        drain();
        if (actions.empty()) {
            if (done == procs.size()) {
                return false;
            }
            throw DeadlockError("no live action while " + std::to_string(procs.size() - done) +
                                " runnables are unfinished");
        }

        sharing.clear();
        for (std::size_t i = 0; i < actions.size(); ++i) {
            actions[i].rate = 0.0;
            if (actions[i].latency_remaining <= 0.0) {
                sharing.push_back(i);
            }
        }
        detail::progressive_fill(
            capacities, sharing.size(),
            [&](std::size_t k) -> const ResourceSet& { return actions[sharing[k]].resources; },
            rates, fill_ws);
        for (std::size_t k = 0; k < sharing.size(); ++k) {
            actions[sharing[k]].rate = rates[k];
        }
        audit_capacity();

        double dt = std::numeric_limits<double>::infinity();
        for (const auto& a : actions) {
            if (a.latency_remaining > 0.0) {
                dt = std::min(dt, a.latency_remaining);
            } else if (a.rate > 0.0) {
                dt = std::min(dt, a.remaining / a.rate);
            }
        }
        if (!std::isfinite(dt)) {
            throw DeadlockError("no live action can progress at t=" + std::to_string(now));
        }

        record_utilization(dt);
        const double tol = 1e-12 * (now + dt);
        std::vector<std::size_t> finished;
        for (std::size_t i = 0; i < actions.size(); ++i) {
            auto& a = actions[i];
            if (a.latency_remaining > 0.0) {
                a.latency_remaining -= dt;
                if (a.latency_remaining <= tol) {
                    a.latency_remaining = 0.0;
                    if (a.remaining <= 0.0) {
                        finished.push_back(i);
                    }
                }
                continue;
            }
            if (a.rate <= 0.0) {
                continue;
            }
            const double ttc = a.remaining / a.rate;
            a.integrated += a.rate * dt;
            if (ttc <= dt + tol) {
                a.remaining = 0.0;
                finished.push_back(i);
            } else {
                a.remaining -= a.rate * dt;
            }
        }
        now += dt;
        ++audit.steps;

        std::sort(finished.begin(), finished.end(), [&](std::size_t x, std::size_t y) {
            const auto& a = actions[x];
            const auto& b = actions[y];
            if (a.owner != b.owner) {
                return a.owner < b.owner;
            }
            if (a.order != b.order) {
                return a.order < b.order;
            }
            return a.id < b.id;
        });
        std::vector<Action> completed;
        completed.reserve(finished.size());
        for (auto i : finished) {
            completed.push_back(std::move(actions[i]));
        }
        std::sort(finished.begin(), finished.end());
        for (auto it = finished.rbegin(); it != finished.rend(); ++it) {
            actions.erase(actions.begin() + static_cast<long>(*it));
        }

        for (const auto& a : completed) {
            ++audit.completed_actions;
            if (a.amount > 0.0) {
                const double err = std::abs(a.integrated - a.amount) / a.amount;
                audit.max_conservation_error = std::max(audit.max_conservation_error, err);
            }
            complete(a);
        }
        drain();
        return true;
    }
};

Kernel::Kernel(const appmodel::ApplicationModel& app, const platform::PlatformModel& platform,
               const mapping::Mapping& mapping, SimulationOptions options)
    : impl_(std::make_unique<Impl>()) {
    auto& k = *impl_;
    k.options = options;
    k.platform = platform;
    k.graph = appmodel::lift_runnable_graph(app);
    mapping::validate_mapping(mapping, app, platform);

    const auto nh = platform.hosts().size();
    std::unordered_map<std::string, std::size_t> label_index;
    for (const auto& l : app.labels) {
        label_index.emplace(l.name, k.label_names.size());
        k.label_names.push_back(l.name);
        k.label_bytes.push_back(static_cast<double>(l.size_bytes));
        k.label_host.push_back(platform.host_index(mapping.label_to_host.at(l.name)));
    }

    const auto n = k.graph.ids.size();
    k.runnable_host.resize(n);
    k.work.resize(n);
    for (const auto& t : app.tasks) {
        for (const auto& r : t.runnables) {
            const auto i = k.graph.index_of(r.id);
            k.runnable_host[i] = platform.host_index(mapping.runnable_to_host.at(r.id));
            const auto norm = r.normalized ? *r.normalized : appmodel::normalize_runnable(r);
            for (const auto& l : norm.reads) {
                k.work[i].reads.push_back(label_index.at(l));
            }
            for (const auto& l : norm.writes) {
                k.work[i].writes.push_back(label_index.at(l));
            }
            k.work[i].compute = norm.compute_work;
        }
    }

    for (const auto& h : platform.hosts()) {
        k.capacities.push_back(h.speed);
    }
    for (const auto& l : platform.links()) {
        k.capacities.push_back(l.bandwidth);
    }
    k.route_latency.assign(nh * nh, 0.0);
    for (std::size_t s = 0; s < nh; ++s) {
        for (std::size_t d = 0; d < nh; ++d) {
            if (!platform.has_route(s, d)) {
                continue;
            }
            double lat = 0.0;
            for (auto l : platform.route_links(s, d)) {
                lat += platform.links()[l].latency;
            }
            k.route_latency[s * nh + d] = lat;
        }
    }

    // Every transfer the run can issue needs a declared route.
    auto need_route = [&](std::size_t s, std::size_t d, const std::string& entity) {
        if (!platform.has_route(s, d)) {
            throw MappingError(entity, "mapping needs a route from '" + platform.hosts()[s].id +
                                           "' to '" + platform.hosts()[d].id + "' (for '" +
                                           entity + "') which the platform does not declare");
        }
    };
    for (std::size_t r = 0; r < n; ++r) {
        for (auto l : k.work[r].reads) {
            need_route(k.label_host[l], k.runnable_host[r], k.label_names[l]);
        }
        for (auto l : k.work[r].writes) {
            need_route(k.runnable_host[r], k.label_host[l], k.label_names[l]);
        }
        for (auto s : k.graph.successors[r]) {
            need_route(k.runnable_host[r], k.runnable_host[s], k.graph.ids[s]);
        }
    }

    k.procs.resize(n);
    k.spans.resize(n);
    k.utilization.assign(nh, {});
    for (std::size_t r = 0; r < n; ++r) {
        k.spans[r].runnable = k.graph.ids[r];
        k.spans[r].host = platform.hosts()[k.runnable_host[r]].id;
        k.procs[r].pending_activations = k.graph.in_degree[r];
        if (k.graph.in_degree[r] > 0) {
            k.procs[r].waited = true;
            k.record_phase(EventKind::PhaseEnter, r, Phase::Waiting);
        }
    }
    for (std::size_t r = 0; r < n; ++r) {
        k.worklist.push_back(r);
    }
    k.drain();
}

Kernel::~Kernel() = default;
Kernel::Kernel(Kernel&&) noexcept = default;
Kernel& Kernel::operator=(Kernel&&) noexcept = default;

bool Kernel::advance() { return impl_->advance(); }

bool Kernel::finished() const { return impl_->done == impl_->procs.size(); }

double Kernel::now() const { return impl_->now; }

std::size_t Kernel::live_actions() const { return impl_->actions.size(); }

ProcessState Kernel::state(const std::string& runnable) const {
    return impl_->procs[impl_->graph.index_of(runnable)].state;
}

SimulationResult Kernel::result() const {
    SimulationResult r;
    r.makespan = impl_->makespan;
    r.timeline = impl_->timeline;
    r.spans = impl_->spans;
    r.utilization = impl_->utilization;
    r.audit = impl_->audit;
    return r;
}

SimulationResult simulate(const appmodel::ApplicationModel& app,
                          const platform::PlatformModel& platform,
                          const mapping::Mapping& mapping, SimulationOptions options) {
    const auto started = std::chrono::steady_clock::now();
    Kernel kernel(app, platform, mapping, options);
    while (kernel.advance()) {
    }
    auto result = kernel.result();
    result.sim_wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    metrics::attach_energy(result, platform);
    return result;
}

} // namespace taskmapper::simkernel
