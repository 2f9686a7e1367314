#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "taskmapper/cli.hpp"
#include "taskmapper/error.hpp"
#include "taskmapper/simkernel.hpp"
#include "taskmapper/trace.hpp"

namespace taskmapper::cli {

namespace fs = std::filesystem;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e)) {
        return IoFailure;
    }
    if (dynamic_cast<const SchemaError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
        dynamic_cast<const ArgumentError*>(&e) || dynamic_cast<const NoRouteError*>(&e) ||
        dynamic_cast<const DomainError*>(&e)) {
        return ValidationFailure;
    }
    return SimulationFailure;
}

namespace {

std::shared_ptr<spdlog::logger> logger() {
    static auto instance = [] {
        auto l = spdlog::stderr_logger_st("taskmapper");
        l->set_pattern("[%l] %v");
        return l;
    }();
    return instance;
}

void configure_logging() {
    const char* env = std::getenv("TASKMAPPER_LOG");
    const std::string level = env ? env : "off";
    if (level == "debug") {
        logger()->set_level(spdlog::level::debug);
    } else if (level == "info") {
        logger()->set_level(spdlog::level::info);
    } else {
        logger()->set_level(spdlog::level::off);
    }
}

// Accepts `file:<path>` or a bare existing path as a mapping file reference.
std::string strategy_spec(const std::string& text) {
    static const char* builtin[] = {"random", "round-robin", "greedy-load"};
    for (auto b : builtin) {
        if (text == b) {
            return text;
        }
    }
    if (text.rfind("all-on:", 0) == 0 || text.rfind("file:", 0) == 0) {
        return text;
    }
    std::error_code ec;
    if (fs::exists(text, ec)) {
        return "file:" + text;
    }
    return text;
}

std::string mapping_path(const std::string& text) {
    return text.rfind("file:", 0) == 0 ? text.substr(5) : text;
}

struct Inputs {
    appmodel::ApplicationModel app;
    platform::PlatformModel platform;
};

Inputs load_inputs(const std::string& app_path, const std::string& platform_path) {
    Inputs in;
    in.app = appmodel::normalize_application(appmodel::parse_application(app_path));
    logger()->info("application {}: {} tasks, {} runnables, {} labels", app_path,
                   in.app.tasks.size(), in.app.runnable_count(), in.app.labels.size());
    in.platform = platform::parse_platform(platform_path);
    logger()->info("platform {}: {} hosts, {} links", platform_path,
                   in.platform.hosts().size(), in.platform.links().size());
    return in;
}

struct ValidateArgs {
    std::string app;
    std::string platform;
    std::string mapping;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
    const auto in = load_inputs(a.app, a.platform);
    if (!a.mapping.empty()) {
        mapping::load_mapping(mapping_path(a.mapping), in.app, in.platform);
    }
    out << "ok\n";
    return Ok;
}

struct SimulateArgs {
    std::string app;
    std::string platform;
    std::string mapping;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool trace = false;
    bool allow_frontend = false;
    bool wall_time = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const auto in = load_inputs(a.app, a.platform);
    const auto strategy = mapping::make_strategy(strategy_spec(a.mapping), {a.allow_frontend});
    const auto m = strategy->produce(in.app, in.platform, a.seed);
    mapping::validate_mapping(m, in.app, in.platform);

    const auto result = simkernel::simulate(in.app, in.platform, m, {.record_timeline = a.trace});
    logger()->debug("kernel steps={} actions={}", result.audit.steps,
                    result.audit.completed_actions);

    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + a.out_dir + ": " + ec.message());
    }
    const fs::path dir(a.out_dir);

    const auto row = metrics::make_row(a.seed, a.seed, strategy->name(), result, a.wall_time);
    {
        std::ostringstream csv;
        metrics::write_batch_csv(csv, in.platform, std::span(&row, 1), true);
        std::ofstream f(dir / "result.csv", std::ios::binary | std::ios::trunc);
        f << csv.str();
        if (!f) {
            throw IoError("cannot write " + (dir / "result.csv").string());
        }
    }
    {
        std::ofstream f(dir / "energy.csv", std::ios::binary | std::ios::trunc);
        f << "host_id,energy_j\n";
        for (const auto& e : result.per_host_energy) {
            f << e.host << ',' << metrics::format_significant(e.joules) << '\n';
        }
        f << "# total_energy_j=" << metrics::format_significant(result.total_energy) << '\n';
        if (!f) {
            throw IoError("cannot write " + (dir / "energy.csv").string());
        }
    }
    mapping::serialize_mapping(m, dir / "mapping.yaml");
    if (a.trace) {
        trace::emit_paje(result, in.platform, m, dir / "trace.paje");
    }

    out << "makespan_s=" << metrics::format_significant(result.makespan) << '\n';
    out << "total_energy_j=" << metrics::format_significant(result.total_energy) << '\n';
    return Ok;
}

struct BatchArgs {
    std::string app;
    std::string platform;
    std::string strategy = "random";
    std::size_t n = 1;
    std::uint64_t seed = 0;
    std::string csv;
    unsigned jobs = 0;
    bool allow_frontend = false;
    bool wall_time = false;
};

int cmd_batch(const BatchArgs& a, std::ostream& out) {
    if (a.n < 1) {
        throw ArgumentError("--n must be at least 1");
    }
    const auto in = load_inputs(a.app, a.platform);
    const auto strategy = mapping::make_strategy(strategy_spec(a.strategy), {a.allow_frontend});
    const unsigned jobs = a.jobs > 0 ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
    logger()->info("batch: {} mappings from seed {} on {} threads", a.n, a.seed, jobs);
    const auto rows = run_batch(in.app, in.platform, *strategy, a.seed, a.n, jobs, a.wall_time);

    std::ostringstream csv;
    metrics::write_batch_csv(csv, in.platform, rows, true);
    std::ofstream f(a.csv, std::ios::binary | std::ios::trunc);
    f << csv.str();
    if (!f) {
        throw IoError("cannot write " + a.csv);
    }
    const auto s = metrics::summarize_batch(rows);
    out << "rows=" << s.rows << '\n';
    out << "min_makespan_s=" << metrics::format_significant(s.makespan.min)
        << " id=" << s.makespan.argmin << '\n';
    out << "max_makespan_s=" << metrics::format_significant(s.makespan.max)
        << " id=" << s.makespan.argmax << '\n';
    return Ok;
}

struct GenerateArgs {
    bool escience = false;
    int ms2 = 32;
    std::string out;
    std::vector<std::string> work;
    std::vector<std::string> label_sizes;
};

std::pair<std::string, std::string> split_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
        throw ArgumentError("expected NAME=VALUE, got '" + text + "'");
    }
    return {text.substr(0, eq), text.substr(eq + 1)};
}

double parse_nonnegative(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !(v >= 0.0) || !std::isfinite(v)) {
        throw ArgumentError(what + ": '" + text + "' is not a non-negative number");
    }
    return v;
}

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    if (!a.escience) {
        throw ArgumentError("generate needs a generator flag (--escience)");
    }
    appmodel::EScienceWork work;
    for (const auto& w : a.work) {
        const auto [stage, value] = split_assignment(w);
        const double v = parse_nonnegative(value, "--work " + stage);
        if (stage == "adapt-state") {
            work.adapt_state = v;
        } else if (stage == "generate-individuals") {
            work.generate_individuals = v;
        } else if (stage == "generate-input-data-sets") {
            work.generate_input_data_sets = v;
        } else if (stage == "ms2") {
            work.ms2 = v;
        } else if (stage == "calculate-fitness") {
            work.calculate_fitness = v;
        } else if (stage == "rank-individuals") {
            work.rank_individuals = v;
        } else if (stage == "check-termination") {
            work.check_termination = v;
        } else if (stage == "next-iteration") {
            work.next_iteration = v;
        } else {
            throw ArgumentError("unknown stage '" + stage + "'");
        }
    }
    appmodel::EScienceLabelSizes sizes;
    for (const auto& s : a.label_sizes) {
        const auto [label, value] = split_assignment(s);
        const double v = parse_nonnegative(value, "--label-size " + label);
        if (v != std::floor(v)) {
            throw ArgumentError("--label-size " + label + ": byte count must be an integer");
        }
        const auto bytes = static_cast<std::uint64_t>(v);
        if (label == "L1") {
            sizes.l1 = bytes;
        } else if (label == "L2") {
            sizes.l2 = bytes;
        } else if (label == "fan-out") {
            sizes.fan_out = bytes;
        } else if (label == "fan-in") {
            sizes.fan_in = bytes;
        } else if (label == "L7") {
            sizes.l7 = bytes;
        } else if (label == "L8") {
            sizes.l8 = bytes;
        } else if (label == "L9") {
            sizes.l9 = bytes;
        } else {
            throw ArgumentError("unknown label group '" + label + "'");
        }
    }
    const auto app = appmodel::generate_escience(a.ms2, work, sizes);
    appmodel::write_application(app, a.out);
    out << "wrote " << a.out << " (" << app.tasks.size() << " tasks)\n";
    return Ok;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    configure_logging();

    CLI::App app{"Simulate static mappings of task-graph applications on cloud platforms", "taskmapper"};
    app.require_subcommand(1);

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "Parse and validate input files");
    validate->add_option("--app", va.app, "Application file")->required();
    validate->add_option("--platform", va.platform, "Platform file")->required();
    validate->add_option("--mapping", va.mapping, "Mapping file (path or file:<path>)");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "Simulate one mapping");
    simulate->add_option("--app", sa.app, "Application file")->required();
    simulate->add_option("--platform", sa.platform, "Platform file")->required();
    simulate->add_option("--mapping", sa.mapping,
                         "random | round-robin | all-on:<host> | greedy-load | file:<path>")
        ->required();
    simulate->add_option("--seed", sa.seed, "Seed for the random strategy");
    simulate->add_option("--out", sa.out_dir, "Output directory")->required();
    simulate->add_flag("--trace", sa.trace, "Also write trace.paje");
    simulate->add_flag("--allow-frontend", sa.allow_frontend, "Let strategies use the frontend");
    simulate->add_flag("--wall-time", sa.wall_time, "Record measured kernel wall time");

    BatchArgs ba;
    auto* batch = app.add_subcommand("batch", "Simulate a seed-indexed sweep of mappings");
    batch->add_option("--app", ba.app, "Application file")->required();
    batch->add_option("--platform", ba.platform, "Platform file")->required();
    batch->add_option("--strategy", ba.strategy, "Mapping strategy");
    batch->add_option("--n", ba.n, "Number of mappings")->required();
    batch->add_option("--seed", ba.seed, "First seed");
    batch->add_option("--csv", ba.csv, "Output CSV path")->required();
    batch->add_option("--jobs", ba.jobs, "Worker threads (default: hardware threads)");
    batch->add_flag("--allow-frontend", ba.allow_frontend, "Let strategies use the frontend");
    batch->add_flag("--wall-time", ba.wall_time, "Record measured kernel wall time");

    GenerateArgs ga;
    auto* generate = app.add_subcommand("generate", "Generate an application file");
    generate->add_flag("--escience", ga.escience, "MS2 eScience pipeline");
    generate->add_option("--ms2", ga.ms2, "Number of parallel MS2 tasks");
    generate->add_option("--out", ga.out, "Output path")->required();
    generate->add_option("--work", ga.work, "STAGE=WORK (repeatable)");
    generate->add_option("--label-size", ga.label_sizes,
                         "L1|L2|fan-out|fan-in|L7|L8|L9=BYTES (repeatable)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? Ok : ValidationFailure;
    }

    try {
        if (*validate) {
            return cmd_validate(va, out);
        }
        if (*simulate) {
            return cmd_simulate(sa, out);
        }
        if (*batch) {
            return cmd_batch(ba, out);
        }
        if (*generate) {
            return cmd_generate(ga, out);
        }
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return ValidationFailure;
}

} // namespace taskmapper::cli
