#include "taskmapper/appmodel.hpp"

#include "common/yaml_support.hpp"

namespace taskmapper::appmodel {

namespace {

using namespace taskmapper::detail;

Instruction parse_instruction(const YAML::Node& node) {
    check_keys(node, {"op", "label", "work"}, "instruction");
    const auto op = as_string(required(node, "op", "instruction"), "instruction.op");
    if (op == "read" || op == "write") {
        if (node["work"]) {
            throw SchemaError(line_of(node), "instruction: '" + op + "' takes no 'work'");
        }
        auto label = as_string(required(node, "label", "instruction"), "instruction.label");
        if (op == "read") {
            return ReadAccess{std::move(label)};
        }
        return WriteAccess{std::move(label)};
    }
    if (op == "compute") {
        if (node["label"]) {
            throw SchemaError(line_of(node), "instruction: 'compute' takes no 'label'");
        }
        return Compute{as_number(required(node, "work", "instruction"), "instruction.work")};
    }
    throw SchemaError(line_of(node), "instruction: unknown op '" + op + "'");
}

Runnable parse_runnable(const YAML::Node& node) {
    check_keys(node, {"id", "instructions"}, "runnable");
    Runnable r;
    r.id = as_string(required(node, "id", "runnable"), "runnable.id");
    for (const auto& ins : optional_seq(node, "instructions", "runnable")) {
        r.instructions.push_back(parse_instruction(ins));
    }
    return r;
}

Edge parse_edge(const YAML::Node& node, const char* from_key, const char* to_key,
                std::string_view what) {
    check_keys(node, {from_key, to_key}, what);
    Edge e;
    e.from = as_string(required(node, from_key, what), std::string(what) + "." + from_key);
    e.to = as_string(required(node, to_key, what), std::string(what) + "." + to_key);
    return e;
}

Task parse_task(const YAML::Node& node) {
    check_keys(node, {"id", "runnables", "precedence"}, "task");
    Task t;
    t.id = as_string(required(node, "id", "task"), "task.id");
    auto runnables = required(node, "runnables", "task");
    expect_seq(runnables, "task.runnables");
    for (const auto& r : runnables) {
        t.runnables.push_back(parse_runnable(r));
    }
    for (const auto& e : optional_seq(node, "precedence", "task")) {
        t.precedence.push_back(parse_edge(e, "from", "to", "precedence"));
    }
    return t;
}

ApplicationModel parse_document(const YAML::Node& root) {
    check_keys(root, {"labels", "tasks", "activations"}, "application");
    ApplicationModel model;
    for (const auto& node : optional_seq(root, "labels", "application")) {
        check_keys(node, {"name", "size_bytes"}, "label");
        Label l;
        l.name = as_string(required(node, "name", "label"), "label.name");
        const auto size = as_integer(required(node, "size_bytes", "label"), "label.size_bytes");
        if (size < 0) {
            throw ValidationError(l.name, "label '" + l.name + "' has negative size_bytes");
        }
        l.size_bytes = static_cast<std::uint64_t>(size);
        model.labels.push_back(std::move(l));
    }
    for (const auto& node : optional_seq(root, "tasks", "application")) {
        model.tasks.push_back(parse_task(node));
    }
    for (const auto& node : optional_seq(root, "activations", "application")) {
        model.activations.push_back(parse_edge(node, "from_task", "to_task", "activation"));
    }
    validate(model);
    return model;
}

} // namespace

ApplicationModel parse_application(const std::filesystem::path& path) {
    return parse_document(load_yaml_file(path));
}

ApplicationModel parse_application_text(const std::string& text) {
    try {
        return parse_document(YAML::Load(text));
    } catch (const YAML::ParserException& e) {
        throw SchemaError(static_cast<std::size_t>(e.mark.line) + 1, e.msg);
    }
}

std::string serialize_application(const ApplicationModel& model) {
    YAML::Emitter out;
    out << YAML::BeginMap;

    out << YAML::Key << "labels" << YAML::Value << YAML::BeginSeq;
    for (const auto& l : model.labels) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "name" << YAML::Value << l.name
            << YAML::Key << "size_bytes" << YAML::Value << l.size_bytes << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "tasks" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : model.tasks) {
        out << YAML::BeginMap << YAML::Key << "id" << YAML::Value << t.id;
        out << YAML::Key << "runnables" << YAML::Value << YAML::BeginSeq;
        for (const auto& r : t.runnables) {
            out << YAML::BeginMap << YAML::Key << "id" << YAML::Value << r.id;
            out << YAML::Key << "instructions" << YAML::Value << YAML::BeginSeq;
            for (const auto& ins : r.instructions) {
                out << YAML::Flow << YAML::BeginMap;
                if (const auto* rd = std::get_if<ReadAccess>(&ins)) {
                    out << YAML::Key << "op" << YAML::Value << "read" << YAML::Key << "label"
                        << YAML::Value << rd->label;
                } else if (const auto* wr = std::get_if<WriteAccess>(&ins)) {
                    out << YAML::Key << "op" << YAML::Value << "write" << YAML::Key << "label"
                        << YAML::Value << wr->label;
                } else {
                    out << YAML::Key << "op" << YAML::Value << "compute" << YAML::Key << "work"
                        << YAML::Value << format_roundtrip(std::get<Compute>(ins).work);
                }
                out << YAML::EndMap;
            }
            out << YAML::EndSeq << YAML::EndMap;
        }
        out << YAML::EndSeq;
        out << YAML::Key << "precedence" << YAML::Value << YAML::BeginSeq;
        for (const auto& e : t.precedence) {
            out << YAML::Flow << YAML::BeginMap << YAML::Key << "from" << YAML::Value << e.from
                << YAML::Key << "to" << YAML::Value << e.to << YAML::EndMap;
        }
        out << YAML::EndSeq << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "activations" << YAML::Value << YAML::BeginSeq;
    for (const auto& a : model.activations) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "from_task" << YAML::Value << a.from
            << YAML::Key << "to_task" << YAML::Value << a.to << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

void write_application(const ApplicationModel& model, const std::filesystem::path& path) {
    write_text_file(path, serialize_application(model));
}

} // namespace taskmapper::appmodel
