#pragma once

// Hosts, links, explicit routes and the linear host power model.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace taskmapper::platform {

struct Host {
    std::string id;
    std::string node;
    double speed = 1.0;  // work units per second
    double p_idle = 0.0; // watts
    double p_full = 0.0; // watts
    bool is_frontend = false;

    friend bool operator==(const Host&, const Host&) = default;
};

struct Link {
    std::string id;
    double bandwidth = 1.0; // bytes per second
    double latency = 0.0;   // seconds

    friend bool operator==(const Link&, const Link&) = default;
};

struct Route {
    std::string src;
    std::string dst;
    std::vector<std::string> links;

    friend bool operator==(const Route&, const Route&) = default;
};

/// A route as written in the platform file; `symmetric` also declares the
/// reverse direction.
struct RouteDeclaration {
    Route route;
    bool symmetric = false;

    friend bool operator==(const RouteDeclaration&, const RouteDeclaration&) = default;
};

class PlatformModel {
public:
    PlatformModel() = default;

    /// Validates and indexes. Throws ValidationError.
    PlatformModel(std::vector<Host> hosts, std::vector<Link> links,
                  std::vector<RouteDeclaration> routes);

    const std::vector<Host>& hosts() const noexcept { return hosts_; }
    const std::vector<Link>& links() const noexcept { return links_; }
    const std::vector<RouteDeclaration>& route_declarations() const noexcept { return declared_; }

    std::optional<std::size_t> find_host(const std::string& id) const;
    std::optional<std::size_t> find_link(const std::string& id) const;
    /// Throws UnknownHostError.
    std::size_t host_index(const std::string& id) const;

    const Host& frontend() const { return hosts_[frontend_]; }

    /// Link indices of the route src -> dst; empty for src == dst. Throws
    /// NoRouteError when undeclared.
    const std::vector<std::size_t>& route_links(std::size_t src, std::size_t dst) const;
    bool has_route(std::size_t src, std::size_t dst) const;

    friend bool operator==(const PlatformModel& a, const PlatformModel& b) {
        return a.hosts_ == b.hosts_ && a.links_ == b.links_ && a.declared_ == b.declared_;
    }

private:
    std::vector<Host> hosts_;
    std::vector<Link> links_;
    std::vector<RouteDeclaration> declared_;
    std::size_t frontend_ = 0;
    // Dense host x host table; nullopt = no route.
    std::vector<std::optional<std::vector<std::size_t>>> table_;
};

PlatformModel parse_platform(const std::filesystem::path& path);
PlatformModel parse_platform_text(const std::string& text);
std::string serialize_platform(const PlatformModel& platform);
void write_platform(const PlatformModel& platform, const std::filesystem::path& path);

/// Throws NoRouteError when the pair is undeclared or names an unknown
/// host. The route from a host to itself is empty.
Route route_between(const PlatformModel& platform, const std::string& src, const std::string& dst);

/// p_idle + (p_full - p_idle) * utilization. Throws DomainError outside [0, 1].
double power_at(const Host& host, double utilization);

/// Hosts a built-in strategy may use, in file order: every non-frontend host,
/// plus the frontend when `allow_frontend`.
std::vector<std::size_t> eligible_hosts(const PlatformModel& platform, bool allow_frontend);

} // namespace taskmapper::platform
