#include "driftopt/de.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "driftopt/error.hpp"

namespace driftopt {

namespace {

constexpr double kStale = std::numeric_limits<double>::quiet_NaN();

void evaluate_all(const Objective& surrogate, const std::vector<Vector>& xs, Vector& out, Execution exec) {
    out.resize(xs.size());
    const long n = static_cast<long>(xs.size());
    if (exec == Execution::parallel) {
        std::exception_ptr error;
#pragma omp parallel for schedule(static)
        for (long i = 0; i < n; ++i) {
            try {
                out[i] = surrogate(xs[i]);
            } catch (...) {
#pragma omp critical(driftopt_de_error)
                if (!error) error = std::current_exception();
            }
        }
        if (error) std::rethrow_exception(error);
    } else {
        for (long i = 0; i < n; ++i) out[i] = surrogate(xs[i]);
    }
    for (long i = 0; i < n; ++i) {
        if (!std::isfinite(out[i])) {
            throw Error("optimize: surrogate returned a non-finite value (" + std::to_string(out[i]) +
                        ") for candidate " + std::to_string(i));
        }
    }
}

}  // namespace

std::size_t Population::best_index() const {
    if (members.empty()) throw ValidationError("best_index of an empty population");
    std::size_t best = 0;
    for (std::size_t i = 1; i < members.size(); ++i) {
        if (members[i].fitness < members[best].fitness) best = i;
    }
    return best;
}

void validate_params(const DeParams& p) {
    if (p.np < 4) throw ValidationError("DE population size must be at least 4, got " + std::to_string(p.np));
    if (!(p.f > 0.0 && p.f <= 2.0)) throw ValidationError("DE differential weight must lie in (0, 2]");
    if (!(p.cr >= 0.0 && p.cr <= 1.0)) throw ValidationError("DE crossover rate must lie in [0, 1]");
    if (p.generations < 1) throw ValidationError("DE needs at least one generation");
}

Population init_population(InitStrategy strategy, const Bounds& bounds, std::size_t np, const Population* prev,
                           Rng& rng) {
    Population pop;
    if (strategy == InitStrategy::carryover) {
        if (prev == nullptr) throw ValidationError("carryover initialization needs a previous population");
        if (prev->size() != np) {
            throw ValidationError("carryover population has " + std::to_string(prev->size()) +
                                  " members, expected " + std::to_string(np));
        }
        pop.members = prev->members;
        for (auto& m : pop.members) m.fitness = kStale;
        return pop;
    }
    pop.members.reserve(np);
    for (std::size_t i = 0; i < np; ++i) {
        Vector x(bounds.dim());
        for (std::size_t j = 0; j < x.size(); ++j) {
            x[j] = std::uniform_real_distribution<double>(bounds.lower[j], bounds.upper[j])(rng);
        }
        pop.members.push_back({std::move(x), kStale});
    }
    return pop;
}

Vector mutate_rand1(const Population& pop, std::size_t target, double f, Rng& rng) {
    const std::size_t np = pop.size();
    if (np < 4) throw ValidationError("rand/1 mutation needs at least 4 members, got " + std::to_string(np));
    std::uniform_int_distribution<std::size_t> pick(0, np - 1);
    std::size_t r1, r2, r3;
    do r1 = pick(rng);
    while (r1 == target);
    do r2 = pick(rng);
    while (r2 == target || r2 == r1);
    do r3 = pick(rng);
    while (r3 == target || r3 == r1 || r3 == r2);

    const auto& a = pop.members[r1].x;
    const auto& b = pop.members[r2].x;
    const auto& c = pop.members[r3].x;
    Vector v(a.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = a[j] + f * (b[j] - c[j]);
    return v;
}

Vector crossover_binomial(std::span<const double> target, std::span<const double> donor, double cr, Rng& rng) {
    if (target.size() != donor.size()) {
        throw ValidationError("crossover: target has dimension " + std::to_string(target.size()) +
                              ", donor " + std::to_string(donor.size()));
    }
    const std::size_t d = target.size();
    const std::size_t j_rand = std::uniform_int_distribution<std::size_t>(0, d - 1)(rng);
    Vector trial(target.begin(), target.end());
    for (std::size_t j = 0; j < d; ++j) {
        const bool take = uniform01(rng) < cr;
        if (take || j == j_rand) trial[j] = donor[j];
    }
    return trial;
}

double reflect_into(double v, double lo, double hi) {
    if (v >= lo && v <= hi) return v;
    const double w = hi - lo;
    double y = std::fmod(v - lo, 2.0 * w);
    if (y < 0.0) y += 2.0 * w;
    if (y > w) y = 2.0 * w - y;
    return std::clamp(lo + y, lo, hi);
}

Population optimize(const Objective& surrogate, Population pop, const DeParams& params, const Bounds& bounds,
                    Rng& rng, Execution exec, const GenerationObserver& observer) {
    validate_params(params);
    if (pop.size() < 4) throw ValidationError("optimize: population needs at least 4 members");
    const std::size_t np = pop.size();
    const std::size_t d = bounds.dim();

    {
        std::vector<Vector> xs;
        xs.reserve(np);
        for (const auto& m : pop.members) {
            if (m.x.size() != d) throw ValidationError("optimize: member dimension does not match bounds");
            xs.push_back(m.x);
        }
        Vector fit;
        evaluate_all(surrogate, xs, fit, exec);
        for (std::size_t i = 0; i < np; ++i) pop.members[i].fitness = fit[i];
    }
    pop.generation = 0;

    std::vector<Vector> trials(np);
    Vector trial_fit;
    for (int g = 0; g < params.generations; ++g) {
        for (std::size_t i = 0; i < np; ++i) {
            const Vector donor = mutate_rand1(pop, i, params.f, rng);
            Vector trial = crossover_binomial(pop.members[i].x, donor, params.cr, rng);
            for (std::size_t j = 0; j < d; ++j) trial[j] = reflect_into(trial[j], bounds.lower[j], bounds.upper[j]);
            trials[i] = std::move(trial);
        }
        evaluate_all(surrogate, trials, trial_fit, exec);
        for (std::size_t i = 0; i < np; ++i) {
            if (trial_fit[i] <= pop.members[i].fitness) {
                pop.members[i].x = std::move(trials[i]);
                pop.members[i].fitness = trial_fit[i];
            }
        }
        ++pop.generation;
        if (observer) observer(pop);
    }
    return pop;
}

}  // namespace driftopt
