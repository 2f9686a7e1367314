#include "taskmapper/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "taskmapper/error.hpp"

namespace taskmapper {

const char* to_string(Phase phase) {
    switch (phase) {
    case Phase::Waiting: return "Waiting";
    case Phase::Reading: return "Reading";
    case Phase::Computing: return "Computing";
    case Phase::Writing: return "Writing";
    }
    return "?";
}

const char* to_string(TransferKind kind) {
    switch (kind) {
    case TransferKind::Read: return "read";
    case TransferKind::Write: return "write";
    case TransferKind::Activation: return "activation";
    }
    return "?";
}

const char* to_string(EventKind kind) {
    switch (kind) {
    case EventKind::PhaseEnter: return "phase-enter";
    case EventKind::PhaseExit: return "phase-exit";
    case EventKind::TransferStart: return "transfer-start";
    case EventKind::TransferEnd: return "transfer-end";
    }
    return "?";
}

namespace metrics {

std::vector<double> integrate_energy(const std::vector<std::vector<UtilizationInterval>>& per_host,
                                     const platform::PlatformModel& platform, double makespan) {
    const auto& hosts = platform.hosts();
    if (per_host.size() > hosts.size()) {
        throw DomainError("utilization series for more hosts than the platform declares");
    }
    if (!(makespan >= 0.0)) {
        throw DomainError("negative makespan");
    }
    std::vector<double> joules(hosts.size(), 0.0);
    for (std::size_t h = 0; h < hosts.size(); ++h) {
        double covered = 0.0;
        double energy = 0.0;
        if (h < per_host.size()) {
            for (const auto& iv : per_host[h]) {
                if (!(iv.duration >= 0.0)) {
                    throw DomainError("negative interval duration on host '" + hosts[h].id + "'");
                }
                energy += platform::power_at(hosts[h], iv.utilization) * iv.duration;
                covered += iv.duration;
            }
        }
        if (makespan > covered) {
            energy += hosts[h].p_idle * (makespan - covered);
        }
        joules[h] = energy;
    }
    return joules;
}

void attach_energy(SimulationResult& result, const platform::PlatformModel& platform) {
    const auto joules = integrate_energy(result.utilization, platform, result.makespan);
    result.per_host_energy.clear();
    result.total_energy = 0.0;
    for (std::size_t h = 0; h < joules.size(); ++h) {
        result.per_host_energy.push_back({platform.hosts()[h].id, joules[h]});
        result.total_energy += joules[h];
    }
}

BatchRow make_row(std::uint64_t mapping_id, std::uint64_t seed, std::string strategy,
                  const SimulationResult& result, bool with_wall_time) {
    BatchRow row;
    row.mapping_id = mapping_id;
    row.seed = seed;
    row.strategy = std::move(strategy);
    row.makespan = result.makespan;
    row.total_energy = result.total_energy;
    if (with_wall_time) {
        row.sim_wall_ms = result.sim_wall_time * 1e3;
    }
    for (const auto& e : result.per_host_energy) {
        row.host_energy.push_back(e.joules);
    }
    return row;
}

namespace {

template <class Get>
ColumnStats column(std::span<const BatchRow> rows, Get get) {
    ColumnStats s;
    s.min = s.max = get(rows.front());
    s.argmin = s.argmax = rows.front().mapping_id;
    double sum = 0.0;
    for (const auto& r : rows) {
        const double v = get(r);
        sum += v;
        if (v < s.min) {
            s.min = v;
            s.argmin = r.mapping_id;
        }
        if (v > s.max) {
            s.max = v;
            s.argmax = r.mapping_id;
        }
    }
    s.mean = sum / static_cast<double>(rows.size());
    return s;
}

} // namespace

BatchSummary summarize_batch(std::span<const BatchRow> rows) {
    if (rows.empty()) {
        throw EmptyBatchError();
    }
    BatchSummary s;
    s.rows = rows.size();
    s.makespan = column(rows, [](const BatchRow& r) { return r.makespan; });
    s.energy = column(rows, [](const BatchRow& r) { return r.total_energy; });
    bool all_timed = true;
    for (const auto& r : rows) {
        all_timed = all_timed && r.sim_wall_ms.has_value();
    }
    if (all_timed) {
        s.wall_ms = column(rows, [](const BatchRow& r) { return *r.sim_wall_ms; });
    }
    return s;
}

std::string format_significant(double value, int digits) {
    if (!std::isfinite(value)) {
        return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
    }
    if (value == 0.0) {
        return "0";
    }
    // Scientific rendering fixes the rounded mantissa digits and exponent.
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, value);
    std::string text(buf);
    const bool negative = text.front() == '-';
    if (negative) {
        text.erase(0, 1);
    }
    const auto epos = text.find('e');
    const int exponent = std::atoi(text.c_str() + epos + 1);
    std::string mantissa;
    for (std::size_t i = 0; i < epos; ++i) {
        if (text[i] != '.') {
            mantissa.push_back(text[i]);
        }
    }
    const int n = static_cast<int>(mantissa.size());
    std::string out;
    if (exponent >= n - 1) {
        out = mantissa + std::string(static_cast<std::size_t>(exponent - (n - 1)), '0');
    } else if (exponent >= 0) {
        out = mantissa.substr(0, static_cast<std::size_t>(exponent + 1)) + "." +
              mantissa.substr(static_cast<std::size_t>(exponent + 1));
    } else {
        out = "0." + std::string(static_cast<std::size_t>(-exponent - 1), '0') + mantissa;
    }
    return negative ? "-" + out : out;
}

std::string csv_header(const platform::PlatformModel& platform) {
    std::string h = "mapping_id,seed,strategy,makespan_s,total_energy_j,sim_wall_ms";
    for (const auto& host : platform.hosts()) {
        h += ",energy_" + host.id + "_j";
    }
    return h;
}

void write_csv_row(std::ostream& out, const BatchRow& row) {
    out << row.mapping_id << ',' << row.seed << ',' << row.strategy << ','
        << format_significant(row.makespan) << ',' << format_significant(row.total_energy) << ',';
    if (row.sim_wall_ms) {
        out << format_significant(*row.sim_wall_ms);
    }
    for (double e : row.host_energy) {
        out << ',' << format_significant(e);
    }
    out << '\n';
}

void write_summary_comments(std::ostream& out, const BatchSummary& s) {
    auto block = [&](const char* name, const ColumnStats& c) {
        out << "# min_" << name << '=' << format_significant(c.min) << " id=" << c.argmin << '\n';
        out << "# max_" << name << '=' << format_significant(c.max) << " id=" << c.argmax << '\n';
        out << "# mean_" << name << '=' << format_significant(c.mean) << '\n';
    };
    out << "# rows=" << s.rows << '\n';
    block("makespan", s.makespan);
    block("total_energy", s.energy);
    if (s.wall_ms) {
        block("sim_wall_ms", *s.wall_ms);
    }
}

void write_batch_csv(std::ostream& out, const platform::PlatformModel& platform,
                     std::span<const BatchRow> rows, bool with_summary) {
    out << csv_header(platform) << '\n';
    for (const auto& r : rows) {
        write_csv_row(out, r);
    }
    if (with_summary) {
        write_summary_comments(out, summarize_batch(rows));
    }
}

} // namespace metrics
} // namespace taskmapper
