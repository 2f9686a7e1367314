#include "taskmapper/simkernel.hpp"

#include <stdexcept>

#include "simkernel/progressive_filling.hpp"

namespace taskmapper::simkernel {

std::vector<double> share_resources(std::span<const double> capacities,
                                    std::span<const ResourceSet> actions) {
    for (const auto& a : actions) {
        if (a.empty()) {
            throw std::invalid_argument("share_resources: action without resources");
        }
        for (auto r : a) {
            if (r >= capacities.size()) {
                throw std::invalid_argument("share_resources: resource index out of range");
            }
        }
    }
    std::vector<double> rates;
    detail::FillWorkspace ws;
    detail::progressive_fill(
        capacities, actions.size(), [&](std::size_t i) -> const ResourceSet& { return actions[i]; },
        rates, ws);
    return rates;
}

} // namespace taskmapper::simkernel
