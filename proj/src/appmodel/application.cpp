#include "taskmapper/appmodel.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "taskmapper/error.hpp"

namespace taskmapper::appmodel {

std::size_t ApplicationModel::runnable_count() const {
    std::size_t n = 0;
    for (const auto& t : tasks) {
        n += t.runnables.size();
    }
    return n;
}

const Label* ApplicationModel::find_label(const std::string& name) const {
    auto it = std::find_if(labels.begin(), labels.end(),
                           [&](const Label& l) { return l.name == name; });
    return it == labels.end() ? nullptr : &*it;
}

const Runnable* ApplicationModel::find_runnable(const std::string& id) const {
    for (const auto& t : tasks) {
        for (const auto& r : t.runnables) {
            if (r.id == id) {
                return &r;
            }
        }
    }
    return nullptr;
}

const Task* ApplicationModel::find_task(const std::string& id) const {
    auto it = std::find_if(tasks.begin(), tasks.end(), [&](const Task& t) { return t.id == id; });
    return it == tasks.end() ? nullptr : &*it;
}

std::vector<std::string> ApplicationModel::runnable_ids() const {
    std::vector<std::string> ids;
    ids.reserve(runnable_count());
    for (const auto& t : tasks) {
        for (const auto& r : t.runnables) {
            ids.push_back(r.id);
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<std::string> ApplicationModel::label_names() const {
    std::vector<std::string> names;
    names.reserve(labels.size());
    for (const auto& l : labels) {
        names.push_back(l.name);
    }
    std::sort(names.begin(), names.end());
    return names;
}

std::size_t RunnableGraph::index_of(const std::string& id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) {
        throw ValidationError(id, "unknown runnable '" + id + "'");
    }
    return static_cast<std::size_t>(it - ids.begin());
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Internal structural checks that the graph lifting relies on.
void validate_structure(const ApplicationModel& model) {
    std::unordered_set<std::string> labels;
    for (const auto& l : model.labels) {
        if (l.name.empty()) {
            throw ValidationError(l.name, "label with empty name");
        }
        if (!labels.insert(l.name).second) {
            throw ValidationError(l.name, "duplicate label '" + l.name + "'");
        }
    }

    std::unordered_set<std::string> tasks;
    std::unordered_set<std::string> runnables;
    for (const auto& t : model.tasks) {
        if (t.id.empty()) {
            throw ValidationError(t.id, "task with empty id");
        }
        if (!tasks.insert(t.id).second) {
            throw ValidationError(t.id, "duplicate task '" + t.id + "'");
        }
        if (t.runnables.empty()) {
            throw ValidationError(t.id, "task '" + t.id + "' has no runnables");
        }
        std::unordered_set<std::string> local;
        for (const auto& r : t.runnables) {
            if (r.id.empty()) {
                throw ValidationError(r.id, "runnable with empty id in task '" + t.id + "'");
            }
            if (!runnables.insert(r.id).second) {
                throw ValidationError(r.id, "duplicate runnable '" + r.id + "'");
            }
            local.insert(r.id);
            for (const auto& ins : r.instructions) {
                std::visit(overloaded{
                               [&](const ReadAccess& a) {
                                   if (!labels.count(a.label)) {
                                       throw ValidationError(a.label, "runnable '" + r.id +
                                                                          "' reads undeclared label '" +
                                                                          a.label + "'");
                                   }
                               },
                               [&](const WriteAccess& a) {
                                   if (!labels.count(a.label)) {
                                       throw ValidationError(a.label, "runnable '" + r.id +
                                                                          "' writes undeclared label '" +
                                                                          a.label + "'");
                                   }
                               },
                               [&](const Compute& c) {
                                   if (!std::isfinite(c.work) || c.work < 0.0) {
                                       throw ValidationError(r.id, "runnable '" + r.id +
                                                                       "' has negative or non-finite compute work");
                                   }
                               },
                           },
                           ins);
            }
        }
        for (const auto& e : t.precedence) {
            for (const auto* end : {&e.from, &e.to}) {
                if (!local.count(*end)) {
                    throw ValidationError(*end, "precedence edge in task '" + t.id +
                                                    "' references runnable '" + *end +
                                                    "' outside the task");
                }
            }
            if (e.from == e.to) {
                throw CycleError(e.from, "runnable '" + e.from + "' precedes itself");
            }
        }
    }

    for (const auto& a : model.activations) {
        for (const auto* end : {&a.from, &a.to}) {
            if (!tasks.count(*end)) {
                throw ValidationError(*end, "activation references unknown task '" + *end + "'");
            }
        }
        if (a.from == a.to) {
            throw CycleError(a.from, "task '" + a.from + "' activates itself");
        }
    }
}

RunnableGraph build_graph(const ApplicationModel& model) {
    RunnableGraph g;
    g.ids = model.runnable_ids();
    const auto n = g.ids.size();
    std::vector<std::set<std::size_t>> succ(n);

    std::unordered_map<std::string, std::vector<std::size_t>> sources;
    std::unordered_map<std::string, std::vector<std::size_t>> sinks;
    for (const auto& t : model.tasks) {
        std::set<std::string> has_in;
        std::set<std::string> has_out;
        for (const auto& e : t.precedence) {
            succ[g.index_of(e.from)].insert(g.index_of(e.to));
            has_out.insert(e.from);
            has_in.insert(e.to);
        }
        for (const auto& r : t.runnables) {
            if (!has_in.count(r.id)) {
                sources[t.id].push_back(g.index_of(r.id));
            }
            if (!has_out.count(r.id)) {
                sinks[t.id].push_back(g.index_of(r.id));
            }
        }
    }
    for (const auto& a : model.activations) {
        for (auto s : sinks[a.from]) {
            for (auto d : sources[a.to]) {
                succ[s].insert(d);
            }
        }
    }

    g.successors.resize(n);
    g.in_degree.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        g.successors[i].assign(succ[i].begin(), succ[i].end());
        for (auto d : succ[i]) {
            ++g.in_degree[d];
        }
    }
    return g;
}

void check_acyclic(const RunnableGraph& g) {
    const auto n = g.ids.size();
    auto pending = g.in_degree;
    std::vector<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i) {
        if (pending[i] == 0) {
            ready.push_back(i);
        }
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        auto v = ready.back();
        ready.pop_back();
        ++visited;
        for (auto s : g.successors[v]) {
            if (--pending[s] == 0) {
                ready.push_back(s);
            }
        }
    }
    if (visited != n) {
        for (std::size_t i = 0; i < n; ++i) {
            if (pending[i] != 0) {
                throw CycleError(g.ids[i], "runnable dependency cycle through '" + g.ids[i] + "'");
            }
        }
    }
}

} // namespace

void validate(const ApplicationModel& model) {
    validate_structure(model);
    check_acyclic(build_graph(model));
}

RunnableGraph lift_runnable_graph(const ApplicationModel& model) {
    validate_structure(model);
    auto g = build_graph(model);
    check_acyclic(g);
    return g;
}

NormalizedRunnable normalize_runnable(const Runnable& runnable) {
    NormalizedRunnable out;
    for (const auto& ins : runnable.instructions) {
        std::visit(overloaded{
                       [&](const ReadAccess& a) { out.reads.push_back(a.label); },
                       [&](const WriteAccess& a) { out.writes.push_back(a.label); },
                       [&](const Compute& c) { out.compute_work += c.work; },
                   },
                   ins);
    }
    return out;
}

ApplicationModel normalize_application(ApplicationModel model) {
    lift_runnable_graph(model);
    for (auto& t : model.tasks) {
        for (auto& r : t.runnables) {
            r.normalized = normalize_runnable(r);
        }
    }
    return model;
}

double compute_work(const Runnable& runnable) {
    if (runnable.normalized) {
        return runnable.normalized->compute_work;
    }
    return normalize_runnable(runnable).compute_work;
}

std::vector<Communication> communications(const ApplicationModel& model) {
    std::map<std::string, std::set<std::string>> writers;
    std::map<std::string, std::set<std::string>> readers;
    for (const auto& t : model.tasks) {
        for (const auto& r : t.runnables) {
            for (const auto& ins : r.instructions) {
                if (const auto* w = std::get_if<WriteAccess>(&ins)) {
                    writers[w->label].insert(t.id);
                } else if (const auto* rd = std::get_if<ReadAccess>(&ins)) {
                    readers[rd->label].insert(t.id);
                }
            }
        }
    }
    std::vector<Communication> out;
    for (const auto& [label, ws] : writers) {
        auto it = readers.find(label);
        if (it == readers.end()) {
            continue;
        }
        for (const auto& w : ws) {
            for (const auto& r : it->second) {
                if (w != r) {
                    out.push_back({w, r, label});
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace taskmapper::appmodel
