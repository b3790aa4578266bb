#include "driftopt/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>

#include "driftopt/error.hpp"

namespace driftopt {

VariantSpec VariantSpec::of(VariantId id) {
    switch (id) {
        case VariantId::SS:
            return {id, SurrogateKind::single, InitStrategy::random, FinalMode::best};
        case VariantId::KTS:
            return {id, SurrogateKind::ensemble, InitStrategy::random, FinalMode::best};
        case VariantId::KTSPI:
            return {id, SurrogateKind::ensemble, InitStrategy::carryover, FinalMode::best};
        case VariantId::KTSPI_TBA:
            return {id, SurrogateKind::ensemble, InitStrategy::carryover, FinalMode::top_k_average};
    }
    throw ValidationError("invalid variant id");
}

std::string_view to_string(VariantId id) {
    switch (id) {
        case VariantId::SS: return "SS";
        case VariantId::KTS: return "KTS";
        case VariantId::KTSPI: return "KTSPI";
        case VariantId::KTSPI_TBA: return "KTSPI_TBA";
    }
    return "?";
}

std::string_view display_name(VariantId id) {
    return id == VariantId::KTSPI_TBA ? std::string_view("KTSPI-TBA") : to_string(id);
}

VariantId parse_variant(std::string_view name) {
    for (VariantId id : kAllVariants) {
        if (to_string(id) == name || display_name(id) == name) return id;
    }
    throw ValidationError("unknown variant '" + std::string(name) + "' (expected SS, KTS, KTSPI or KTSPI_TBA)");
}

std::uint64_t run_seed(std::uint64_t master_seed, ProblemId problem, std::size_t run_index) {
    return derive_seed(master_seed, {static_cast<std::uint64_t>(problem), run_index});
}

std::uint64_t environment_seed(std::uint64_t run_seed) { return derive_seed(run_seed, {0x656e76ULL}); }

std::uint64_t algorithm_seed(std::uint64_t run_seed) { return derive_seed(run_seed, {0x616c67ULL}); }

ChunkGenerator::ChunkGenerator(ProblemId id, const ProtocolSettings& protocol, std::uint64_t env_seed)
    : rng_(make_rng(env_seed)),
      problem_(make_problem(id, protocol.dim, rng_, protocol.severity)),
      plan_(SamplingPlan::for_dim(protocol.dim, protocol.sampling)) {}

DataChunk ChunkGenerator::sample() { return sample_chunk(problem_, plan_, rng_); }

void ChunkGenerator::advance() { problem_ = advance_environment(std::move(problem_), rng_); }

std::vector<DataChunk> generate_chunks(ProblemId id, const ProtocolSettings& protocol, std::uint64_t seed) {
    ChunkGenerator gen(id, protocol, environment_seed(seed));
    std::vector<DataChunk> out;
    out.reserve(protocol.envs);
    for (std::size_t t = 0; t < protocol.envs; ++t) {
        if (t > 0) gen.advance();
        out.push_back(gen.sample());
    }
    return out;
}

IncrementalOptimizer::IncrementalOptimizer(const VariantSpec& variant, const AlgorithmSettings& settings,
                                           std::uint64_t algo_seed)
    : variant_(variant), settings_(settings), seed_(algo_seed), rng_(make_rng(algo_seed)) {
    validate_params(settings_.de);
}

StepResult IncrementalOptimizer::step(const DataChunk& raw) {
    const DataChunk chunk = validate_chunk(raw);
    const std::span<const DataChunk> history =
        variant_.surrogate == SurrogateKind::ensemble ? std::span<const DataChunk>(history_)
                                                      : std::span<const DataChunk>();
    EnsembleSurrogate surrogate =
        update_ensemble(history, chunk, settings_.rbf, settings_.ensemble, seed_, settings_.exec);

    const bool carry = variant_.init == InitStrategy::carryover && previous_.has_value() &&
                       previous_->size() == settings_.de.np && previous_->members.front().x.size() == chunk.dim();
    Population init = init_population(carry ? InitStrategy::carryover : InitStrategy::random, chunk.bounds,
                                      settings_.de.np, carry ? &*previous_ : nullptr, rng_);
    const Objective objective = [&surrogate](std::span<const double> x) { return surrogate.predict(x); };
    Population final_pop = optimize(objective, std::move(init), settings_.de, chunk.bounds, rng_, settings_.exec);
    FinalSolution final = produce_final(final_pop, variant_.final, settings_.elite_fraction, objective);

    if (variant_.surrogate == SurrogateKind::ensemble) {
        history_.push_back(chunk);
        const std::size_t cap = settings_.ensemble.max_history;
        if (cap > 0 && history_.size() > cap) history_.erase(history_.begin(), history_.end() - cap);
    }
    previous_ = final_pop;
    ++seen_;
    return {chunk.env_index, std::move(final), std::move(final_pop), std::move(surrogate)};
}

RunRecord run_variant(const VariantSpec& variant, ProblemId problem, const ProtocolSettings& protocol,
                      const AlgorithmSettings& settings, std::uint64_t seed, std::size_t run_index,
                      const EnvObserver& observer) {
    if (protocol.envs == 0) throw ValidationError("protocol needs at least one environment");
    RunRecord rec{variant.id, problem, run_index, seed, {}, 0.0};
    rec.per_env.reserve(protocol.envs);

    ChunkGenerator gen(problem, protocol, environment_seed(seed));
    IncrementalOptimizer opt(variant, settings, algorithm_seed(seed));
    double total = 0.0;
    for (std::size_t t = 0; t < protocol.envs; ++t) {
        try {
            if (t > 0) gen.advance();
            const std::size_t evals_before = true_evaluation_count();
            const DataChunk chunk = gen.sample();
            const StepResult step = opt.step(chunk);
            // Reporting only; never fed back into the optimizer.
            const double truth = evaluate_true(gen.problem(), step.final.x);
            const std::size_t evals = true_evaluation_count() - evals_before;
            if (observer) observer(EnvTrace{chunk, step, truth, evals});
            total += truth;
            rec.per_env.push_back({chunk.env_index, step.final.x, truth});
        } catch (const std::exception& e) {
            throw Error(fmt::format("{} {} environment {}: {}", to_string(problem), to_string(variant.id), t,
                                    e.what()));
        }
    }
    rec.mean_true_value = total / static_cast<double>(protocol.envs);
    return rec;
}

const CellResult& ExperimentReport::cell(ProblemId p, VariantId v) const {
    for (const auto& c : cells) {
        if (c.problem == p && c.variant == v) return c;
    }
    throw ValidationError(fmt::format("no report cell for {} / {}", to_string(p), to_string(v)));
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, Execution exec) {
    if (cfg.parallelism < 1) throw ValidationError("parallelism must be at least 1");
    if (cfg.problems.empty() || cfg.variants.empty() || cfg.protocol.runs == 0) {
        throw ValidationError("experiment needs at least one problem, one variant and one run");
    }
    const std::size_t nv = cfg.variants.size();
    const std::size_t nr = cfg.protocol.runs;
    const std::size_t jobs = cfg.problems.size() * nv * nr;

    std::vector<std::optional<RunRecord>> records(jobs);
    std::vector<std::string> errors(jobs);

    // Job j covers (problem, variant, run) in row-major order; its seed depends
    // only on (problem, run), never on which thread or when it executes.
    auto run_job = [&](std::size_t j) {
        const ProblemId p = cfg.problems[j / (nv * nr)];
        const VariantId v = cfg.variants[(j / nr) % nv];
        const std::size_t r = j % nr;
        try {
            records[j] = run_variant(VariantSpec::of(v), p, cfg.protocol, cfg.algorithm,
                                     run_seed(cfg.master_seed, p, r), r);
        } catch (const std::exception& e) {
            errors[j] = e.what();
        }
    };

    if (exec == Execution::parallel) {
        const long n = static_cast<long>(jobs);
#pragma omp parallel for schedule(dynamic) num_threads(cfg.parallelism)
        for (long j = 0; j < n; ++j) run_job(static_cast<std::size_t>(j));
    } else {
        for (std::size_t j = 0; j < jobs; ++j) run_job(j);
    }

    ExperimentReport report;
    for (std::size_t pi = 0; pi < cfg.problems.size(); ++pi) {
        for (std::size_t vi = 0; vi < nv; ++vi) {
            CellResult cell{cfg.problems[pi], cfg.variants[vi], 0.0, 0, {}};
            double sum = 0.0;
            for (std::size_t r = 0; r < nr; ++r) {
                const std::size_t j = (pi * nv + vi) * nr + r;
                if (records[j]) {
                    sum += records[j]->mean_true_value;
                    ++cell.completed_runs;
                    report.records.push_back(std::move(*records[j]));
                } else {
                    cell.errors.push_back(fmt::format("run {}: {}", r, errors[j]));
                }
            }
            cell.mean = cell.completed_runs > 0 ? sum / static_cast<double>(cell.completed_runs)
                                                : std::numeric_limits<double>::quiet_NaN();
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

std::vector<SummaryRow> summarize(std::span<const RunRecord> records) {
    if (records.empty()) throw ValidationError("summarize: no run records");
    std::map<std::pair<ProblemId, VariantId>, std::vector<double>> groups;
    for (const auto& r : records) groups[{r.problem, r.variant}].push_back(r.mean_true_value);

    std::vector<SummaryRow> rows;
    for (auto& [key, values] : groups) {
        // Sorting fixes the summation order, so the result ignores record order.
        std::sort(values.begin(), values.end());
        const double n = static_cast<double>(values.size());
        double sum = 0.0;
        for (double v : values) sum += v;
        const double mean = sum / n;
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        SummaryRow row{key.first, key.second, mean, 0.0, values.size(), values.size() == 1, 0};
        if (values.size() > 1) row.sd = std::sqrt(ss / (n - 1.0));
        rows.push_back(row);
    }
    for (auto& row : rows) {
        for (const auto& other : rows) {
            if (other.problem == row.problem && other.variant != row.variant && other.mean > row.mean) ++row.wins;
        }
    }
    return rows;
}

std::string format_table(std::span<const SummaryRow> rows) {
    std::vector<ProblemId> problems;
    std::vector<VariantId> variants;
    for (const auto& r : rows) {
        if (std::find(problems.begin(), problems.end(), r.problem) == problems.end()) problems.push_back(r.problem);
        if (std::find(variants.begin(), variants.end(), r.variant) == variants.end()) variants.push_back(r.variant);
    }
    std::sort(problems.begin(), problems.end());
    std::sort(variants.begin(), variants.end());

    std::string out = fmt::format("{:<6}", "Name");
    for (VariantId v : variants) out += fmt::format(" {:>14}", display_name(v));
    out += '\n';
    for (ProblemId p : problems) {
        out += fmt::format("{:<6}", to_string(p));
        for (VariantId v : variants) {
            auto it = std::find_if(rows.begin(), rows.end(),
                                   [&](const SummaryRow& r) { return r.problem == p && r.variant == v; });
            out += it == rows.end() ? fmt::format(" {:>14}", "-") : fmt::format(" {:>14.6g}", it->mean);
        }
        out += '\n';
    }
    return out;
}

}  // namespace driftopt
