#include "taskmapper/trace.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "taskmapper/error.hpp"

namespace taskmapper::trace {

namespace {

// Event identifiers used in the header below.
enum PajeEvent {
    DefineContainerType = 0,
    DefineStateType = 1,
    DefineLinkType = 2,
    DefineEntityValue = 3,
    CreateContainer = 4,
    DestroyContainer = 5,
    SetState = 6,
    StartLink = 7,
    EndLink = 8,
};

std::string stamp(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", t);
    return buf;
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        out.push_back(c == '"' ? '\'' : c);
    }
    out.push_back('"');
    return out;
}

const char* state_alias(Phase p) {
    switch (p) {
    case Phase::Waiting: return "V_Waiting";
    case Phase::Reading: return "V_Reading";
    case Phase::Computing: return "V_Computing";
    case Phase::Writing: return "V_Writing";
    }
    return "V_Waiting";
}

struct Timed {
    double time;
    std::size_t seq;
    std::string line;
};

} // namespace

const std::string& paje_header() {
    static const std::string header =
        "%EventDef PajeDefineContainerType 0\n"
        "%       Alias string\n"
        "%       Type string\n"
        "%       Name string\n"
        "%EndEventDef\n"
        "%EventDef PajeDefineStateType 1\n"
        "%       Alias string\n"
        "%       Type string\n"
        "%       Name string\n"
        "%EndEventDef\n"
        "%EventDef PajeDefineLinkType 2\n"
        "%       Alias string\n"
        "%       Type string\n"
        "%       StartContainerType string\n"
        "%       EndContainerType string\n"
        "%       Name string\n"
        "%EndEventDef\n"
        "%EventDef PajeDefineEntityValue 3\n"
        "%       Alias string\n"
        "%       Type string\n"
        "%       Name string\n"
        "%       Color color\n"
        "%EndEventDef\n"
        "%EventDef PajeCreateContainer 4\n"
        "%       Time date\n"
        "%       Alias string\n"
        "%       Type string\n"
        "%       Container string\n"
        "%       Name string\n"
        "%EndEventDef\n"
        "%EventDef PajeDestroyContainer 5\n"
        "%       Time date\n"
        "%       Type string\n"
        "%       Name string\n"
        "%EndEventDef\n"
        "%EventDef PajeSetState 6\n"
        "%       Time date\n"
        "%       Type string\n"
        "%       Container string\n"
        "%       Value string\n"
        "%EndEventDef\n"
        "%EventDef PajeStartLink 7\n"
        "%       Time date\n"
        "%       Type string\n"
        "%       Container string\n"
        "%       Value string\n"
        "%       StartContainer string\n"
        "%       Key string\n"
        "%EndEventDef\n"
        "%EventDef PajeEndLink 8\n"
        "%       Time date\n"
        "%       Type string\n"
        "%       Container string\n"
        "%       Value string\n"
        "%       EndContainer string\n"
        "%       Key string\n"
        "%EndEventDef\n";
    return header;
}

void emit_paje(const SimulationResult& result, const platform::PlatformModel& platform,
               const mapping::Mapping& mapping, std::ostream& out) {
    out << paje_header();
    out << DefineContainerType << " CT_Platform 0 \"Platform\"\n";
    out << DefineContainerType << " CT_Host CT_Platform \"Host\"\n";
    out << DefineContainerType << " CT_Runnable CT_Host \"Runnable\"\n";
    out << DefineStateType << " ST_Runnable CT_Runnable \"RunnableState\"\n";
    out << DefineLinkType << " LT_Dependency CT_Platform CT_Runnable CT_Runnable \"Dependency\"\n";
    out << DefineLinkType << " LT_Transfer CT_Platform CT_Host CT_Host \"Transfer\"\n";
    out << DefineEntityValue << " V_Waiting ST_Runnable \"Waiting\" \"0.7 0.7 0.7\"\n";
    out << DefineEntityValue << " V_Reading ST_Runnable \"Reading\" \"0.2 0.4 1.0\"\n";
    out << DefineEntityValue << " V_Computing ST_Runnable \"Computing\" \"1.0 0.5 0.0\"\n";
    out << DefineEntityValue << " V_Writing ST_Runnable \"Writing\" \"0.2 0.8 0.2\"\n";
    out << DefineEntityValue << " V_Done ST_Runnable \"Done\" \"1.0 1.0 1.0\"\n";

    const std::string zero = stamp(0.0);
    std::map<std::string, std::string> host_alias;
    out << CreateContainer << ' ' << zero << " C_Platform CT_Platform 0 \"Platform\"\n";
    for (std::size_t h = 0; h < platform.hosts().size(); ++h) {
        const auto& id = platform.hosts()[h].id;
        host_alias[id] = "h" + std::to_string(h);
        out << CreateContainer << ' ' << zero << ' ' << host_alias[id] << " CT_Host C_Platform "
            << quoted(id) << '\n';
    }
    std::map<std::string, std::string> runnable_alias;
    std::size_t k = 0;
    for (const auto& [id, host] : mapping.runnable_to_host) {
        runnable_alias[id] = "r" + std::to_string(k++);
        out << CreateContainer << ' ' << zero << ' ' << runnable_alias[id] << " CT_Runnable "
            << host_alias.at(host) << ' ' << quoted(id) << '\n';
    }

    std::vector<Timed> events;
    auto push = [&](double t, std::string line) {
        events.push_back({t, events.size(), std::move(line)});
    };
    for (const auto& e : result.timeline) {
        std::ostringstream line;
        const auto t = stamp(e.time);
        switch (e.kind) {
        case EventKind::PhaseEnter:
            line << SetState << ' ' << t << " ST_Runnable " << runnable_alias.at(e.runnable) << ' '
                 << state_alias(e.phase);
            break;
        case EventKind::PhaseExit:
            continue; // the next SetState (or Done) closes the phase
        case EventKind::TransferStart:
        case EventKind::TransferEnd: {
            const bool start = e.kind == EventKind::TransferStart;
            const auto key = "k" + std::to_string(e.transfer_id);
            if (e.transfer == TransferKind::Activation) {
                line << (start ? StartLink : EndLink) << ' ' << t
                     << " LT_Dependency C_Platform \"activation\" "
                     << runnable_alias.at(start ? e.runnable : e.successor) << ' ' << key;
            } else {
                line << (start ? StartLink : EndLink) << ' ' << t << " LT_Transfer C_Platform "
                     << quoted(std::string(to_string(e.transfer)) + " " + e.label) << ' '
                     << host_alias.at(start ? e.src_host : e.dst_host) << ' ' << key;
            }
            break;
        }
        }
        push(e.time, line.str());
    }
    for (const auto& s : result.spans) {
        push(s.finish, std::to_string(SetState) + ' ' + stamp(s.finish) + " ST_Runnable " +
                           runnable_alias.at(s.runnable) + " V_Done");
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const Timed& a, const Timed& b) { return a.time < b.time; });
    for (const auto& e : events) {
        out << e.line << '\n';
    }

    const auto end = stamp(result.makespan);
    for (const auto& [id, alias] : runnable_alias) {
        out << DestroyContainer << ' ' << end << " CT_Runnable " << alias << '\n';
    }
    for (std::size_t h = 0; h < platform.hosts().size(); ++h) {
        out << DestroyContainer << ' ' << end << " CT_Host h" << h << '\n';
    }
    out << DestroyContainer << ' ' << end << " CT_Platform C_Platform\n";
}

void emit_paje(const SimulationResult& result, const platform::PlatformModel& platform,
               const mapping::Mapping& mapping, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    emit_paje(result, platform, mapping, out);
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

} // namespace taskmapper::trace
