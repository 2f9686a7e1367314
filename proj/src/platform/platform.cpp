#include "taskmapper/platform.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "taskmapper/error.hpp"

namespace taskmapper::platform {

PlatformModel::PlatformModel(std::vector<Host> hosts, std::vector<Link> links,
                             std::vector<RouteDeclaration> routes)
    : hosts_(std::move(hosts)), links_(std::move(links)), declared_(std::move(routes)) {
    std::unordered_set<std::string> seen;
    std::size_t frontends = 0;
    for (std::size_t i = 0; i < hosts_.size(); ++i) {
        const auto& h = hosts_[i];
        if (h.id.empty()) {
            throw ValidationError(h.id, "host with empty id");
        }
        if (!seen.insert(h.id).second) {
            throw ValidationError(h.id, "duplicate host '" + h.id + "'");
        }
        if (!(h.speed > 0.0) || !std::isfinite(h.speed)) {
            throw ValidationError(h.id, "host '" + h.id + "' must have a positive finite speed");
        }
        if (!(h.p_idle >= 0.0) || !std::isfinite(h.p_full) || h.p_full < h.p_idle) {
            throw ValidationError(h.id, "host '" + h.id + "' needs 0 <= p_idle <= p_full");
        }
        if (h.is_frontend) {
            ++frontends;
            frontend_ = i;
        }
    }
    if (frontends != 1) {
        throw ValidationError("frontend", "platform needs exactly one frontend host, found " +
                                              std::to_string(frontends));
    }

    seen.clear();
    for (const auto& l : links_) {
        if (l.id.empty()) {
            throw ValidationError(l.id, "link with empty id");
        }
        if (!seen.insert(l.id).second) {
            throw ValidationError(l.id, "duplicate link '" + l.id + "'");
        }
        if (!(l.bandwidth > 0.0) || !std::isfinite(l.bandwidth)) {
            throw ValidationError(l.id, "link '" + l.id + "' must have a positive finite bandwidth");
        }
        if (!(l.latency >= 0.0) || !std::isfinite(l.latency)) {
            throw ValidationError(l.id, "link '" + l.id + "' must have a non-negative latency");
        }
    }

    const auto n = hosts_.size();
    table_.assign(n * n, std::nullopt);
    for (std::size_t i = 0; i < n; ++i) {
        table_[i * n + i] = std::vector<std::size_t>{};
    }

    auto install = [&](std::size_t s, std::size_t d, std::vector<std::size_t> path,
                       const Route& origin) {
        if (s == d) {
            if (!path.empty()) {
                throw ValidationError(origin.src, "route from '" + origin.src +
                                                      "' to itself must be empty");
            }
            return;
        }
        auto& slot = table_[s * n + d];
        if (slot) {
            throw ValidationError(origin.src, "duplicate route '" + hosts_[s].id + "' -> '" +
                                                  hosts_[d].id + "'");
        }
        slot = std::move(path);
    };

    for (const auto& decl : declared_) {
        const auto& r = decl.route;
        auto s = find_host(r.src);
        auto d = find_host(r.dst);
        if (!s) {
            throw ValidationError(r.src, "route references unknown host '" + r.src + "'");
        }
        if (!d) {
            throw ValidationError(r.dst, "route references unknown host '" + r.dst + "'");
        }
        std::vector<std::size_t> path;
        for (const auto& lid : r.links) {
            auto li = find_link(lid);
            if (!li) {
                throw ValidationError(lid, "route '" + r.src + "' -> '" + r.dst +
                                               "' references unknown link '" + lid + "'");
            }
            path.push_back(*li);
        }
        if (decl.symmetric) {
            std::vector<std::size_t> reverse(path.rbegin(), path.rend());
            install(*d, *s, std::move(reverse), r);
        }
        install(*s, *d, std::move(path), r);
    }
}

std::optional<std::size_t> PlatformModel::find_host(const std::string& id) const {
    for (std::size_t i = 0; i < hosts_.size(); ++i) {
        if (hosts_[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> PlatformModel::find_link(const std::string& id) const {
    for (std::size_t i = 0; i < links_.size(); ++i) {
        if (links_[i].id == id) {
            return i;
        }
    }
    return std::nullopt;
}

std::size_t PlatformModel::host_index(const std::string& id) const {
    auto i = find_host(id);
    if (!i) {
        throw UnknownHostError(id);
    }
    return *i;
}

bool PlatformModel::has_route(std::size_t src, std::size_t dst) const {
    return table_[src * hosts_.size() + dst].has_value();
}

const std::vector<std::size_t>& PlatformModel::route_links(std::size_t src, std::size_t dst) const {
    const auto& slot = table_[src * hosts_.size() + dst];
    if (!slot) {
        throw NoRouteError("no route from '" + hosts_[src].id + "' to '" + hosts_[dst].id + "'");
    }
    return *slot;
}

Route route_between(const PlatformModel& platform, const std::string& src, const std::string& dst) {
    const auto s = platform.host_index(src);
    const auto d = platform.find_host(dst);
    if (!d) {
        throw NoRouteError("no route from '" + src + "' to unknown host '" + dst + "'");
    }
    Route r{src, dst, {}};
    for (auto li : platform.route_links(s, *d)) {
        r.links.push_back(platform.links()[li].id);
    }
    return r;
}

double power_at(const Host& host, double utilization) {
    if (!(utilization >= 0.0 && utilization <= 1.0)) {
        throw DomainError("utilization " + std::to_string(utilization) + " outside [0, 1]");
    }
    return host.p_idle + (host.p_full - host.p_idle) * utilization;
}

std::vector<std::size_t> eligible_hosts(const PlatformModel& platform, bool allow_frontend) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < platform.hosts().size(); ++i) {
        if (allow_frontend || !platform.hosts()[i].is_frontend) {
            out.push_back(i);
        }
    }
    return out;
}

} // namespace taskmapper::platform
