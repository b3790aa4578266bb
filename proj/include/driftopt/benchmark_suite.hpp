#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driftopt/core_data.hpp"
#include "driftopt/rng.hpp"

namespace driftopt {

/// Stand-in dynamic landscapes. Every base function has its global minimum 0
/// at the origin of the transformed coordinates z = R_t (x - o_t).
///   F1 sphere                       F4 Rosenbrock, shifted so z = 0 is optimal
///   F2 Rastrigin                    F5 Ackley, value offset starting at 2000
///   F3 1000 x Griewank              F6 hybrid: sphere on the first half of z,
///                                      Rastrigin on the rest
/// F1 and F2 are unrotated; F3-F6 draw a fresh random rotation per environment.
enum class ProblemId { F1 = 1, F2, F3, F4, F5, F6 };

inline constexpr ProblemId kAllProblems[] = {ProblemId::F1, ProblemId::F2, ProblemId::F3,
                                             ProblemId::F4, ProblemId::F5, ProblemId::F6};

std::string_view to_string(ProblemId id);
ProblemId parse_problem(std::string_view name);

struct Severity {
    /// Per-environment shift of the optimum, as a fraction of the bound width.
    double shift_fraction = 0.1;
    /// Standard deviation of the per-environment change of the value offset.
    double value = 5.0;
};

struct DynamicProblem {
    ProblemId id = ProblemId::F1;
    std::size_t dim = 0;
    Bounds bounds;
    std::size_t env_index = 0;
    Vector optimum_shift;  // o_t
    double value_offset = 0.0;  // h_t
    Vector rotation;  // row-major dim x dim; empty means identity
    double shift_severity = 0.0;  // absolute, in decision-space units
    double value_severity = 0.0;

    bool rotated() const { return !rotation.empty(); }
    bool operator==(const DynamicProblem&) const = default;
};

/// Bounds are [-5, 5]^dim for every problem. The initial optimum is drawn
/// uniformly in bounds and, for rotated problems, the initial rotation too.
DynamicProblem make_problem(ProblemId id, std::size_t dim, Rng& rng, const Severity& severity = {});

/// Base function value at transformed coordinates z.
double base_function(ProblemId id, std::span<const double> z);

/// base_function(R_t (x - o_t)) + h_t. Throws ValidationError for x outside
/// bounds. Each call bumps the calling thread's true-evaluation counter.
double evaluate_true(const DynamicProblem& p, std::span<const double> x);

/// Calls to evaluate_true made by the current thread so far.
std::size_t true_evaluation_count();

/// o += s * u for a uniform random unit vector u (clamped to bounds),
/// h += s_h * N(0, 1), rotation re-drawn for rotated problems, t += 1.
/// Zero severity leaves the landscape unchanged.
DynamicProblem advance_environment(DynamicProblem p, Rng& rng);

/// Haar-distributed random rotation (orthogonal, det = +1), row-major.
Vector random_rotation(std::size_t dim, Rng& rng);

/// One sample per equal-width stratum in every dimension, uniform jitter
/// within the stratum, independent stratum permutations per dimension.
std::vector<Vector> latin_hypercube(std::size_t n, const Bounds& bounds, Rng& rng);
std::vector<Vector> uniform_sample(std::size_t n, const Bounds& bounds, Rng& rng);

enum class SamplingMethod { latin_hypercube, uniform };

std::string_view to_string(SamplingMethod m);
SamplingMethod parse_sampling(std::string_view name);

struct SamplingPlan {
    std::size_t points_per_env = 0;
    SamplingMethod method = SamplingMethod::latin_hypercube;

    /// 3 * dim points per environment.
    static SamplingPlan for_dim(std::size_t dim, SamplingMethod method = SamplingMethod::latin_hypercube) {
        return {3 * dim, method};
    }
};

DataChunk sample_chunk(const DynamicProblem& p, const SamplingPlan& plan, Rng& rng);

}  // namespace driftopt
