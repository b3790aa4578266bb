#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "driftopt/core_data.hpp"
#include "driftopt/parallel.hpp"
#include "driftopt/rng.hpp"

namespace driftopt {

/// Surrogate objective, minimized. Must be safe for concurrent calls when the
/// optimizer runs with Execution::parallel.
using Objective = std::function<double(std::span<const double>)>;

struct Individual {
    Vector x;
    /// NaN marks a fitness that has not been evaluated against the current surrogate.
    double fitness;

    bool operator==(const Individual&) const = default;
};

struct Population {
    std::vector<Individual> members;
    int generation = 0;

    std::size_t size() const { return members.size(); }
    std::size_t best_index() const;
    double best_fitness() const { return members[best_index()].fitness; }

    bool operator==(const Population&) const = default;
};

enum class BoundHandling { reflect };
enum class InitStrategy { random, carryover };

struct DeParams {
    std::size_t np = 50;
    double f = 0.5;
    double cr = 0.9;
    int generations = 100;
    BoundHandling bound_handling = BoundHandling::reflect;
};

void validate_params(const DeParams& p);

/// random: i.i.d. uniform within bounds. carryover: copy of `prev` with every
/// fitness marked stale and the generation counter reset.
Population init_population(InitStrategy strategy, const Bounds& bounds, std::size_t np,
                           const Population* prev, Rng& rng);

/// v = x_r1 + f * (x_r2 - x_r3), with r1, r2, r3 distinct and different from
/// `target`. No bound handling.
Vector mutate_rand1(const Population& pop, std::size_t target, double f, Rng& rng);

/// Binomial crossover; the coordinate j_rand always comes from the donor.
Vector crossover_binomial(std::span<const double> target, std::span<const double> donor, double cr, Rng& rng);

/// Folds v back into [lo, hi] by repeated reflection across the violated bound.
double reflect_into(double v, double lo, double hi);

/// Called after every completed generation with the current population.
using GenerationObserver = std::function<void(const Population&)>;

/// DE/rand/1/bin with greedy selection (the trial wins ties). Every member is
/// first re-evaluated on `surrogate`. Trials of a generation are built from the
/// population snapshot, evaluated, then selected in index order, so the
/// serial and parallel paths follow the same trajectory. Member order is
/// preserved. Throws Error if the surrogate returns a non-finite value.
Population optimize(const Objective& surrogate, Population init, const DeParams& params, const Bounds& bounds,
                    Rng& rng, Execution exec = Execution::serial, const GenerationObserver& observer = {});

}  // namespace driftopt
