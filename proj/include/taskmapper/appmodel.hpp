#pragma once

// Application model: labels (shared data), runnables (read/compute/write
// instruction lists) and tasks (runnable DAGs linked by activation edges).

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace taskmapper::appmodel {

struct Label {
    std::string name;
    std::uint64_t size_bytes = 0;

    friend bool operator==(const Label&, const Label&) = default;
};

struct ReadAccess {
    std::string label;
    friend bool operator==(const ReadAccess&, const ReadAccess&) = default;
};

struct WriteAccess {
    std::string label;
    friend bool operator==(const WriteAccess&, const WriteAccess&) = default;
};

/// Abstract work units; hosts execute `speed` units per second.
struct Compute {
    double work = 0.0;
    friend bool operator==(const Compute&, const Compute&) = default;
};

using Instruction = std::variant<ReadAccess, WriteAccess, Compute>;

/// A runnable with its instructions gathered into three phases. Repeated
/// accesses to the same label are kept as separate entries.
struct NormalizedRunnable {
    std::vector<std::string> reads;
    double compute_work = 0.0;
    std::vector<std::string> writes;

    friend bool operator==(const NormalizedRunnable&, const NormalizedRunnable&) = default;
};

struct Runnable {
    std::string id;
    std::vector<Instruction> instructions;
    std::optional<NormalizedRunnable> normalized;

    friend bool operator==(const Runnable&, const Runnable&) = default;
};

struct Edge {
    std::string from;
    std::string to;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Task {
    std::string id;
    std::vector<Runnable> runnables;
    /// Runnable-to-runnable precedence inside this task.
    std::vector<Edge> precedence;

    friend bool operator==(const Task&, const Task&) = default;
};

struct ApplicationModel {
    std::vector<Label> labels;
    std::vector<Task> tasks;
    /// Task-to-task activation edges.
    std::vector<Edge> activations;

    friend bool operator==(const ApplicationModel&, const ApplicationModel&) = default;

    std::size_t runnable_count() const;
    const Label* find_label(const std::string& name) const;
    const Runnable* find_runnable(const std::string& id) const;
    const Task* find_task(const std::string& id) const;
    /// Sorted ids of every runnable / label.
    std::vector<std::string> runnable_ids() const;
    std::vector<std::string> label_names() const;
};

/// Runnable-level dependency DAG obtained by lifting each activation edge
/// Ti -> Tj to sinks(Ti) x sources(Tj) and adding task-internal precedence.
/// Runnables are indexed in lexicographic id order.
struct RunnableGraph {
    std::vector<std::string> ids;
    std::vector<std::vector<std::size_t>> successors; // sorted, duplicate-free
    std::vector<std::size_t> in_degree;

    std::size_t index_of(const std::string& id) const;
};

/// A label-mediated communication between two tasks: `writer_task` writes
/// `label` and `reader_task` reads it.
struct Communication {
    std::string writer_task;
    std::string reader_task;
    std::string label;

    friend auto operator<=>(const Communication&, const Communication&) = default;
};

/// Throws ValidationError (or CycleError) naming the offending entity.
void validate(const ApplicationModel& model);

ApplicationModel parse_application(const std::filesystem::path& path);
ApplicationModel parse_application_text(const std::string& text);
std::string serialize_application(const ApplicationModel& model);
void write_application(const ApplicationModel& model, const std::filesystem::path& path);

NormalizedRunnable normalize_runnable(const Runnable& runnable);

/// Fills `normalized` on every runnable. Idempotent. Throws CycleError when
/// the lifted runnable graph has a cycle.
ApplicationModel normalize_application(ApplicationModel model);

/// Compute work of a runnable, from its normalized form when present.
double compute_work(const Runnable& runnable);

/// Throws CycleError when the lifted graph is cyclic.
RunnableGraph lift_runnable_graph(const ApplicationModel& model);

std::vector<Communication> communications(const ApplicationModel& model);

/// Per-stage compute work for the eScience pipeline.
struct EScienceWork {
    double adapt_state = 1e7;
    double generate_individuals = 1e7;
    double generate_input_data_sets = 1e7;
    double ms2 = 3e7;
    double calculate_fitness = 1e7;
    double rank_individuals = 1e7;
    double check_termination = 1e7;
    double next_iteration = 1e7;
};

/// Label sizes in bytes. `fan_out` applies to every GenerateInputDataSets ->
/// MS2 label, `fan_in` to every MS2 -> CalculateFitness label.
struct EScienceLabelSizes {
    std::uint64_t l1 = 1'000'000;
    std::uint64_t l2 = 1'000'000;
    std::uint64_t fan_out = 1'000'000;
    std::uint64_t fan_in = 1'000'000;
    std::uint64_t l7 = 1'000'000;
    std::uint64_t l8 = 1'000'000;
    std::uint64_t l9 = 1'000'000;
};

/// Generates the MS2 genetic-algorithm pipeline with `ms2_count` parallel MS2
/// tasks, one runnable per task. The loop back to AdaptState is unrolled into
/// a terminal NextIteration task fed by CheckTermination through L9, giving
/// ms2_count + 7 tasks. Throws ArgumentError for ms2_count < 1 or
/// negative work.
ApplicationModel generate_escience(int ms2_count, const EScienceWork& work = {},
                                   const EScienceLabelSizes& sizes = {});

/// Id of the i-th (1-based) MS2 runnable, zero-padded so lexicographic order
/// follows numeric order.
std::string escience_ms2_runnable_id(int index, int ms2_count);

} // namespace taskmapper::appmodel
