#pragma once

// Strict YAML reading helpers shared by the application, platform and
// mapping parsers. Not part of the public interface.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include <yaml-cpp/yaml.h>

#include "taskmapper/error.hpp"

namespace taskmapper::detail {

inline std::size_t line_of(const YAML::Node& node) {
    const auto mark = node.Mark();
    return mark.is_null() ? 0 : static_cast<std::size_t>(mark.line) + 1;
}

inline YAML::Node load_yaml_file(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
        throw FileNotFound(path.string());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return YAML::Load(buffer.str());
    } catch (const YAML::ParserException& e) {
        throw SchemaError(static_cast<std::size_t>(e.mark.line) + 1, e.msg);
    }
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

inline void expect_map(const YAML::Node& node, std::string_view what) {
    if (!node.IsMap()) {
        throw SchemaError(line_of(node), std::string(what) + ": expected a mapping");
    }
}

inline void expect_seq(const YAML::Node& node, std::string_view what) {
    if (!node.IsSequence()) {
        throw SchemaError(line_of(node), std::string(what) + ": expected a list");
    }
}

/// Rejects any key not in `allowed`.
inline void check_keys(const YAML::Node& node, std::initializer_list<std::string_view> allowed,
                       std::string_view what) {
    expect_map(node, what);
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        bool known = false;
        for (auto a : allowed) {
            known = known || key == a;
        }
        if (!known) {
            throw SchemaError(line_of(kv.first),
                              std::string(what) + ": unknown key '" + key + "'");
        }
    }
}

inline YAML::Node required(const YAML::Node& node, const char* key, std::string_view what) {
    auto child = node[key];
    if (!child) {
        throw SchemaError(line_of(node),
                          std::string(what) + ": missing required key '" + key + "'");
    }
    return child;
}

/// Optional list: absent and explicit null both read as empty.
inline YAML::Node optional_seq(const YAML::Node& node, const char* key, std::string_view what) {
    auto child = node[key];
    if (!child || child.IsNull()) {
        return YAML::Node(YAML::NodeType::Sequence);
    }
    expect_seq(child, std::string(what) + "." + key);
    return child;
}

inline std::string as_string(const YAML::Node& node, std::string_view what) {
    if (!node.IsScalar()) {
        throw SchemaError(line_of(node), std::string(what) + ": expected a string");
    }
    return node.Scalar();
}

inline double as_number(const YAML::Node& node, std::string_view what) {
    double value = 0.0;
    if (!node.IsScalar() || !YAML::convert<double>::decode(node, value) || !std::isfinite(value)) {
        throw SchemaError(line_of(node), std::string(what) + ": expected a finite number");
    }
    return value;
}

inline std::int64_t as_integer(const YAML::Node& node, std::string_view what) {
    std::int64_t value = 0;
    if (!node.IsScalar() || !YAML::convert<std::int64_t>::decode(node, value)) {
        throw SchemaError(line_of(node), std::string(what) + ": expected an integer");
    }
    return value;
}

inline bool as_bool(const YAML::Node& node, std::string_view what) {
    bool value = false;
    if (!node.IsScalar() || !YAML::convert<bool>::decode(node, value)) {
        throw SchemaError(line_of(node), std::string(what) + ": expected true or false");
    }
    return value;
}

/// Shortest decimal text that parses back to exactly `value`.
inline std::string format_roundtrip(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

} // namespace taskmapper::detail
