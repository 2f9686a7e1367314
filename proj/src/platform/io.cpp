#include "taskmapper/platform.hpp"

#include "common/yaml_support.hpp"

namespace taskmapper::platform {

namespace {

using namespace taskmapper::detail;

PlatformModel parse_document(const YAML::Node& root) {
    check_keys(root, {"hosts", "links", "routes"}, "platform");

    std::vector<Host> hosts;
    auto host_nodes = required(root, "hosts", "platform");
    expect_seq(host_nodes, "platform.hosts");
    for (const auto& node : host_nodes) {
        check_keys(node, {"id", "node", "speed", "p_idle", "p_full", "frontend"}, "host");
        Host h;
        h.id = as_string(required(node, "id", "host"), "host.id");
        h.node = as_string(required(node, "node", "host"), "host.node");
        h.speed = as_number(required(node, "speed", "host"), "host.speed");
        h.p_idle = as_number(required(node, "p_idle", "host"), "host.p_idle");
        h.p_full = as_number(required(node, "p_full", "host"), "host.p_full");
        if (node["frontend"]) {
            h.is_frontend = as_bool(node["frontend"], "host.frontend");
        }
        hosts.push_back(std::move(h));
    }

    std::vector<Link> links;
    for (const auto& node : optional_seq(root, "links", "platform")) {
        check_keys(node, {"id", "bandwidth", "latency"}, "link");
        Link l;
        l.id = as_string(required(node, "id", "link"), "link.id");
        l.bandwidth = as_number(required(node, "bandwidth", "link"), "link.bandwidth");
        l.latency = as_number(required(node, "latency", "link"), "link.latency");
        links.push_back(std::move(l));
    }

    std::vector<RouteDeclaration> routes;
    for (const auto& node : optional_seq(root, "routes", "platform")) {
        check_keys(node, {"src", "dst", "links", "symmetric"}, "route");
        RouteDeclaration d;
        d.route.src = as_string(required(node, "src", "route"), "route.src");
        d.route.dst = as_string(required(node, "dst", "route"), "route.dst");
        for (const auto& l : optional_seq(node, "links", "route")) {
            d.route.links.push_back(as_string(l, "route.links"));
        }
        if (node["symmetric"]) {
            d.symmetric = as_bool(node["symmetric"], "route.symmetric");
        }
        routes.push_back(std::move(d));
    }

    return PlatformModel(std::move(hosts), std::move(links), std::move(routes));
}

} // namespace

PlatformModel parse_platform(const std::filesystem::path& path) {
    return parse_document(load_yaml_file(path));
}

PlatformModel parse_platform_text(const std::string& text) {
    try {
        return parse_document(YAML::Load(text));
    } catch (const YAML::ParserException& e) {
        throw SchemaError(static_cast<std::size_t>(e.mark.line) + 1, e.msg);
    }
}

std::string serialize_platform(const PlatformModel& platform) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "hosts" << YAML::Value << YAML::BeginSeq;
    for (const auto& h : platform.hosts()) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << h.id;
        out << YAML::Key << "node" << YAML::Value << h.node;
        out << YAML::Key << "speed" << YAML::Value << format_roundtrip(h.speed);
        out << YAML::Key << "p_idle" << YAML::Value << format_roundtrip(h.p_idle);
        out << YAML::Key << "p_full" << YAML::Value << format_roundtrip(h.p_full);
        out << YAML::Key << "frontend" << YAML::Value << h.is_frontend;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "links" << YAML::Value << YAML::BeginSeq;
    for (const auto& l : platform.links()) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "id" << YAML::Value << l.id;
        out << YAML::Key << "bandwidth" << YAML::Value << format_roundtrip(l.bandwidth);
        out << YAML::Key << "latency" << YAML::Value << format_roundtrip(l.latency);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "routes" << YAML::Value << YAML::BeginSeq;
    for (const auto& d : platform.route_declarations()) {
        out << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "src" << YAML::Value << d.route.src;
        out << YAML::Key << "dst" << YAML::Value << d.route.dst;
        out << YAML::Key << "links" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (const auto& l : d.route.links) {
            out << l;
        }
        out << YAML::EndSeq;
        out << YAML::Key << "symmetric" << YAML::Value << d.symmetric;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

void write_platform(const PlatformModel& platform, const std::filesystem::path& path) {
    write_text_file(path, serialize_platform(platform));
}

} // namespace taskmapper::platform
