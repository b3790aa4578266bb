#include "driftopt/benchmark_suite.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "driftopt/error.hpp"

namespace driftopt {

namespace {

thread_local std::size_t t_true_evals = 0;

constexpr double kLower = -5.0;
constexpr double kUpper = 5.0;

double sphere(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return s;
}

double rastrigin(std::span<const double> z) {
    double s = 10.0 * static_cast<double>(z.size());
    for (double v : z) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    return s;
}

double griewank(std::span<const double> z) {
    double sum = 0.0;
    double prod = 1.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        sum += z[i] * z[i];
        prod *= std::cos(z[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return sum / 4000.0 - prod + 1.0;
}

// Classic Rosenbrock evaluated at z + 1 so that the minimum sits at z = 0.
double rosenbrock_shifted(std::span<const double> z) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) {
        const double a = z[i] + 1.0;
        const double b = z[i + 1] + 1.0;
        s += 100.0 * (b - a * a) * (b - a * a) + (a - 1.0) * (a - 1.0);
    }
    return s;
}

double ackley(std::span<const double> z) {
    const double n = static_cast<double>(z.size());
    double sq = 0.0;
    double cs = 0.0;
    for (double v : z) {
        sq += v * v;
        cs += std::cos(2.0 * std::numbers::pi * v);
    }
    // Grouped so that both terms vanish exactly at the origin.
    const double value = 20.0 * (1.0 - std::exp(-0.2 * std::sqrt(sq / n))) + (std::exp(1.0) - std::exp(cs / n));
    return std::max(0.0, value);
}

double hybrid(std::span<const double> z) {
    const std::size_t split = (z.size() + 1) / 2;
    return sphere(z.first(split)) + rastrigin(z.subspan(split));
}

double initial_offset(ProblemId id) { return id == ProblemId::F5 ? 2000.0 : 0.0; }

bool is_rotated(ProblemId id) { return id != ProblemId::F1 && id != ProblemId::F2; }

}  // namespace

std::string_view to_string(ProblemId id) {
    switch (id) {
        case ProblemId::F1: return "F1";
        case ProblemId::F2: return "F2";
        case ProblemId::F3: return "F3";
        case ProblemId::F4: return "F4";
        case ProblemId::F5: return "F5";
        case ProblemId::F6: return "F6";
    }
    return "?";
}

ProblemId parse_problem(std::string_view name) {
    for (ProblemId id : kAllProblems) {
        if (to_string(id) == name) return id;
    }
    throw ValidationError("unknown problem '" + std::string(name) + "' (expected F1..F6)");
}

std::string_view to_string(SamplingMethod m) { return m == SamplingMethod::uniform ? "uniform" : "lhs"; }

SamplingMethod parse_sampling(std::string_view name) {
    if (name == "lhs") return SamplingMethod::latin_hypercube;
    if (name == "uniform") return SamplingMethod::uniform;
    throw ValidationError("unknown sampling method '" + std::string(name) + "' (expected lhs or uniform)");
}

double base_function(ProblemId id, std::span<const double> z) {
    switch (id) {
        case ProblemId::F1: return sphere(z);
        case ProblemId::F2: return rastrigin(z);
        case ProblemId::F3: return 1000.0 * griewank(z);
        case ProblemId::F4: return rosenbrock_shifted(z);
        case ProblemId::F5: return ackley(z);
        case ProblemId::F6: return hybrid(z);
    }
    throw ValidationError("invalid problem id");
}

Vector random_rotation(std::size_t dim, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd a(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
        for (std::size_t c = 0; c < dim; ++c) a(r, c) = gauss(rng);
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Sign fix of R's diagonal makes Q Haar-distributed.
    for (std::size_t c = 0; c < dim; ++c) {
        if (r(c, c) < 0.0) q.col(c) *= -1.0;
    }
    if (q.determinant() < 0.0) q.col(0) *= -1.0;
    Vector out(dim * dim);
    for (std::size_t r_ = 0; r_ < dim; ++r_) {
        for (std::size_t c = 0; c < dim; ++c) out[r_ * dim + c] = q(r_, c);
    }
    return out;
}

DynamicProblem make_problem(ProblemId id, std::size_t dim, Rng& rng, const Severity& severity) {
    if (dim == 0) throw ValidationError("make_problem: dimension must be positive");
    DynamicProblem p;
    p.id = id;
    p.dim = dim;
    p.bounds = Bounds::uniform(dim, kLower, kUpper);
    p.optimum_shift.resize(dim);
    for (auto& v : p.optimum_shift) v = std::uniform_real_distribution<double>(kLower, kUpper)(rng);
    p.value_offset = initial_offset(id);
    if (is_rotated(id)) p.rotation = random_rotation(dim, rng);
    p.shift_severity = severity.shift_fraction * (kUpper - kLower);
    p.value_severity = severity.value;
    return p;
}

double evaluate_true(const DynamicProblem& p, std::span<const double> x) {
    if (!p.bounds.contains(x)) throw ValidationError("evaluate_true: point outside the problem bounds");
    ++t_true_evals;
    const std::size_t d = p.dim;
    Vector diff(d);
    for (std::size_t j = 0; j < d; ++j) diff[j] = x[j] - p.optimum_shift[j];
    if (!p.rotated()) return base_function(p.id, diff) + p.value_offset;
    Vector z(d, 0.0);
    for (std::size_t r = 0; r < d; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += p.rotation[r * d + c] * diff[c];
        z[r] = s;
    }
    return base_function(p.id, z) + p.value_offset;
}

std::size_t true_evaluation_count() { return t_true_evals; }

DynamicProblem advance_environment(DynamicProblem p, Rng& rng) {
    ++p.env_index;
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (p.shift_severity > 0.0) {
        Vector u(p.dim);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (auto& v : u) {
                v = gauss(rng);
                norm += v * v;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (std::size_t j = 0; j < p.dim; ++j) {
            p.optimum_shift[j] = std::clamp(p.optimum_shift[j] + p.shift_severity * u[j] / norm,
                                            p.bounds.lower[j], p.bounds.upper[j]);
        }
    }
    if (p.value_severity > 0.0) p.value_offset += p.value_severity * gauss(rng);
    if (p.rotated() && p.shift_severity > 0.0) p.rotation = random_rotation(p.dim, rng);
    return p;
}

std::vector<Vector> latin_hypercube(std::size_t n, const Bounds& bounds, Rng& rng) {
    if (n == 0) throw ValidationError("latin_hypercube: need at least one sample");
    const std::size_t d = bounds.dim();
    std::vector<Vector> pts(n, Vector(d));
    std::vector<std::size_t> strata(n);
    for (std::size_t j = 0; j < d; ++j) {
        std::iota(strata.begin(), strata.end(), 0);
        std::shuffle(strata.begin(), strata.end(), rng);
        const double w = bounds.width(j) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = bounds.lower[j] + (static_cast<double>(strata[i]) + uniform01(rng)) * w;
            pts[i][j] = std::min(v, bounds.upper[j]);
        }
    }
    return pts;
}

std::vector<Vector> uniform_sample(std::size_t n, const Bounds& bounds, Rng& rng) {
    std::vector<Vector> pts(n, Vector(bounds.dim()));
    for (auto& x : pts) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            x[j] = std::uniform_real_distribution<double>(bounds.lower[j], bounds.upper[j])(rng);
        }
    }
    return pts;
}

DataChunk sample_chunk(const DynamicProblem& p, const SamplingPlan& plan, Rng& rng) {
    if (plan.points_per_env < 2) throw ValidationError("sampling plan needs at least 2 points per environment");
    DataChunk c;
    c.env_index = p.env_index;
    c.bounds = p.bounds;
    c.xs = plan.method == SamplingMethod::uniform ? uniform_sample(plan.points_per_env, p.bounds, rng)
                                                  : latin_hypercube(plan.points_per_env, p.bounds, rng);
    c.ys.reserve(c.xs.size());
    for (const auto& x : c.xs) c.ys.push_back(evaluate_true(p, x));
    return c;
}

}  // namespace driftopt
