#pragma once

#include <cstddef>

#include "driftopt/core_data.hpp"
#include "driftopt/de.hpp"

namespace driftopt {

enum class FinalMode { best, top_k_average };

struct FinalSolution {
    Vector x;
    double surrogate_value = 0.0;
    FinalMode mode = FinalMode::best;
};

/// k = ceil(fraction * np), at least 1 and at most np.
std::size_t elite_count(std::size_t np, double fraction);

/// best: the member of minimal fitness (lowest index on ties).
/// top_k_average: mean decision vector of the k fittest members. Its
/// surrogate_value is `surrogate` at the mean when one is given, else the
/// mean of the k fitnesses.
FinalSolution produce_final(const Population& pop, FinalMode mode, double fraction = 0.1,
                            const Objective& surrogate = {});

}  // namespace driftopt
