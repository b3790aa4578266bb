#include "driftopt/solution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "driftopt/error.hpp"

namespace driftopt {

std::size_t elite_count(std::size_t np, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ValidationError("elite fraction must lie in (0, 1]");
    // Absorb rounding so that fraction = 1/np gives exactly one member.
    const double raw = fraction * static_cast<double>(np);
    const auto k = static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
    return std::clamp<std::size_t>(k, 1, np);
}

FinalSolution produce_final(const Population& pop, FinalMode mode, double fraction, const Objective& surrogate) {
    if (pop.members.empty()) throw ValidationError("produce_final: empty population");
    const std::size_t np = pop.size();

    if (mode == FinalMode::best) {
        const auto& m = pop.members[pop.best_index()];
        return {m.x, m.fitness, FinalMode::best};
    }

    const std::size_t k = elite_count(np, fraction);
    std::vector<std::size_t> order(np);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pop.members[a].fitness < pop.members[b].fitness;
    });

    const std::size_t d = pop.members.front().x.size();
    Vector x(d, 0.0);
    double fit = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
        const auto& m = pop.members[order[r]];
        for (std::size_t j = 0; j < d; ++j) x[j] += m.x[j];
        fit += m.fitness;
    }
    for (auto& v : x) v /= static_cast<double>(k);
    fit /= static_cast<double>(k);
    // The componentwise mean cannot leave the elites' bounding box; pin it there
    // so rounding in the running sum never pushes a coordinate outside.
    for (std::size_t j = 0; j < d; ++j) {
        double lo = pop.members[order[0]].x[j];
        double hi = lo;
        for (std::size_t r = 1; r < k; ++r) {
            lo = std::min(lo, pop.members[order[r]].x[j]);
            hi = std::max(hi, pop.members[order[r]].x[j]);
        }
        x[j] = std::clamp(x[j], lo, hi);
    }
    const double value = surrogate ? surrogate(x) : fit;
    return {std::move(x), value, FinalMode::top_k_average};
}

}  // namespace driftopt
