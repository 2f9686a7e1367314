#include "taskmapper/mapping.hpp"

#include "common/yaml_support.hpp"

namespace taskmapper::mapping {

namespace {

using namespace taskmapper::detail;

void read_entries(const YAML::Node& root, const char* key, std::map<std::string, std::string>& out) {
    for (const auto& node : optional_seq(root, key, "mapping")) {
        check_keys(node, {"id", "host"}, std::string("mapping.") + key);
        auto id = as_string(required(node, "id", key), "mapping.id");
        auto host = as_string(required(node, "host", key), "mapping.host");
        if (!out.emplace(id, std::move(host)).second) {
            throw SchemaError(line_of(node), "'" + id + "' is mapped twice");
        }
    }
}

Mapping parse_document(const YAML::Node& root) {
    check_keys(root, {"runnables", "labels"}, "mapping");
    Mapping m;
    read_entries(root, "runnables", m.runnable_to_host);
    read_entries(root, "labels", m.label_to_host);
    return m;
}

void write_entries(YAML::Emitter& out, const char* key,
                   const std::map<std::string, std::string>& entries) {
    out << YAML::Key << key << YAML::Value << YAML::BeginSeq;
    for (const auto& [id, host] : entries) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "id" << YAML::Value << id << YAML::Key
            << "host" << YAML::Value << host << YAML::EndMap;
    }
    out << YAML::EndSeq;
}

} // namespace

Mapping parse_mapping(const std::filesystem::path& path) {
    return parse_document(load_yaml_file(path));
}

Mapping parse_mapping_text(const std::string& text) {
    try {
        return parse_document(YAML::Load(text));
    } catch (const YAML::ParserException& e) {
        throw SchemaError(static_cast<std::size_t>(e.mark.line) + 1, e.msg);
    }
}

Mapping load_mapping(const std::filesystem::path& path, const appmodel::ApplicationModel& app,
                     const platform::PlatformModel& platform) {
    auto m = parse_mapping(path);
    validate_mapping(m, app, platform);
    return m;
}

std::string serialize_mapping(const Mapping& mapping) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    write_entries(out, "runnables", mapping.runnable_to_host);
    write_entries(out, "labels", mapping.label_to_host);
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

void serialize_mapping(const Mapping& mapping, const std::filesystem::path& path) {
    write_text_file(path, serialize_mapping(mapping));
}

} // namespace taskmapper::mapping
