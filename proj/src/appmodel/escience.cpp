#include "taskmapper/appmodel.hpp"

#include <cmath>
#include <string>

#include "taskmapper/error.hpp"

namespace taskmapper::appmodel {

namespace {

std::string padded(int index, int count) {
    const auto width = std::to_string(count).size();
    auto s = std::to_string(index);
    return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

// One task holding one runnable that reads `inputs`, computes, then writes
// `outputs`.
Task stage(const std::string& task_id, const std::string& runnable_id,
           const std::vector<std::string>& inputs, double work,
           const std::vector<std::string>& outputs) {
    Runnable r;
    r.id = runnable_id;
    for (const auto& l : inputs) {
        r.instructions.emplace_back(ReadAccess{l});
    }
    r.instructions.emplace_back(Compute{work});
    for (const auto& l : outputs) {
        r.instructions.emplace_back(WriteAccess{l});
    }
    return Task{task_id, {std::move(r)}, {}};
}

} // namespace

std::string escience_ms2_runnable_id(int index, int ms2_count) {
    return "R4_" + padded(index, ms2_count);
}

ApplicationModel generate_escience(int ms2_count, const EScienceWork& work,
                                   const EScienceLabelSizes& sizes) {
    if (ms2_count < 1) {
        throw ArgumentError("eScience generator needs at least one MS2 task, got " +
                            std::to_string(ms2_count));
    }
    for (double w : {work.adapt_state, work.generate_individuals, work.generate_input_data_sets,
                     work.ms2, work.calculate_fitness, work.rank_individuals,
                     work.check_termination, work.next_iteration}) {
        if (!std::isfinite(w) || w < 0.0) {
            throw ArgumentError("eScience stage work must be finite and non-negative");
        }
    }

    ApplicationModel m;
    std::vector<std::string> fan_out;
    std::vector<std::string> fan_in;
    m.labels.push_back({"L1", sizes.l1});
    m.labels.push_back({"L2", sizes.l2});
    for (int i = 1; i <= ms2_count; ++i) {
        fan_out.push_back("L3_" + padded(i, ms2_count));
        m.labels.push_back({fan_out.back(), sizes.fan_out});
    }
    for (int i = 1; i <= ms2_count; ++i) {
        fan_in.push_back("L5_" + padded(i, ms2_count));
        m.labels.push_back({fan_in.back(), sizes.fan_in});
    }
    m.labels.push_back({"L7", sizes.l7});
    m.labels.push_back({"L8", sizes.l8});
    m.labels.push_back({"L9", sizes.l9});

    m.tasks.push_back(stage("AdaptState", "R1", {}, work.adapt_state, {"L1"}));
    m.tasks.push_back(stage("GenerateIndividuals", "R2", {"L1"}, work.generate_individuals, {"L2"}));
    m.tasks.push_back(stage("GenerateInputDataSets", "R3", {"L2"}, work.generate_input_data_sets,
                            fan_out));
    for (int i = 1; i <= ms2_count; ++i) {
        const auto idx = static_cast<std::size_t>(i - 1);
        m.tasks.push_back(stage("MS2_" + padded(i, ms2_count), escience_ms2_runnable_id(i, ms2_count),
                                {fan_out[idx]}, work.ms2, {fan_in[idx]}));
    }
    m.tasks.push_back(stage("CalculateFitness", "R6", fan_in, work.calculate_fitness, {"L7"}));
    m.tasks.push_back(stage("RankIndividuals", "R7", {"L7"}, work.rank_individuals, {"L8"}));
    m.tasks.push_back(stage("CheckTermination", "R8", {"L8"}, work.check_termination, {"L9"}));
    m.tasks.push_back(stage("NextIteration", "R9", {"L9"}, work.next_iteration, {}));

    m.activations.push_back({"AdaptState", "GenerateIndividuals"});
    m.activations.push_back({"GenerateIndividuals", "GenerateInputDataSets"});
    for (int i = 1; i <= ms2_count; ++i) {
        m.activations.push_back({"GenerateInputDataSets", "MS2_" + padded(i, ms2_count)});
    }
    for (int i = 1; i <= ms2_count; ++i) {
        m.activations.push_back({"MS2_" + padded(i, ms2_count), "CalculateFitness"});
    }
    m.activations.push_back({"CalculateFitness", "RankIndividuals"});
    m.activations.push_back({"RankIndividuals", "CheckTermination"});
    m.activations.push_back({"CheckTermination", "NextIteration"});

    validate(m);
    return m;
}

} // namespace taskmapper::appmodel
