#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driftopt/benchmark_suite.hpp"
#include "driftopt/core_data.hpp"
#include "driftopt/de.hpp"
#include "driftopt/ensemble.hpp"
#include "driftopt/parallel.hpp"
#include "driftopt/rbf.hpp"
#include "driftopt/solution.hpp"

namespace driftopt {

enum class VariantId { SS, KTS, KTSPI, KTSPI_TBA };
enum class SurrogateKind { single, ensemble };

inline constexpr VariantId kAllVariants[] = {VariantId::SS, VariantId::KTS, VariantId::KTSPI,
                                             VariantId::KTSPI_TBA};

/// Ablation variant: which surrogate, which DE initialization, which final
/// solution rule.
struct VariantSpec {
    VariantId id;
    SurrogateKind surrogate;
    InitStrategy init;
    FinalMode final;

    static VariantSpec of(VariantId id);
};

std::string_view to_string(VariantId id);
/// Column heading used in the report table ("KTSPI-TBA" rather than "KTSPI_TBA").
std::string_view display_name(VariantId id);
VariantId parse_variant(std::string_view name);

struct AlgorithmSettings {
    DeParams de;
    RbfConfig rbf;
    EnsembleConfig ensemble;
    double elite_fraction = 0.1;
    /// Execution of the kernels inside one run (DE evaluation, model training).
    Execution exec = Execution::serial;
};

struct ProtocolSettings {
    std::size_t dim = 10;
    std::size_t envs = 50;
    std::size_t runs = 20;
    SamplingMethod sampling = SamplingMethod::latin_hypercube;
    Severity severity;
};

/// Per-run seed shared by every variant, so variants with the same run index
/// see the same environments and the same chunks.
std::uint64_t run_seed(std::uint64_t master_seed, ProblemId problem, std::size_t run_index);
/// Substream driving the benchmark dynamics and chunk sampling.
std::uint64_t environment_seed(std::uint64_t run_seed);
/// Substream driving model training, DE initialization and DE search.
std::uint64_t algorithm_seed(std::uint64_t run_seed);

/// Ground-truth side of a run: owns the dynamic problem and the environment
/// random stream. Used both by run_variant and by chunk dumping so that the
/// two produce identical chunks.
class ChunkGenerator {
public:
    ChunkGenerator(ProblemId id, const ProtocolSettings& protocol, std::uint64_t env_seed);

    const DynamicProblem& problem() const { return problem_; }
    DataChunk sample();
    void advance();

private:
    Rng rng_;
    DynamicProblem problem_;
    SamplingPlan plan_;
};

std::vector<DataChunk> generate_chunks(ProblemId id, const ProtocolSettings& protocol, std::uint64_t run_seed);

struct StepResult {
    std::size_t env_index = 0;
    FinalSolution final;
    Population population;
    EnsembleSurrogate surrogate;
};

/// The per-environment loop of one variant: surrogate update, population
/// initialization, DE search and final-solution production. Sees only data
/// chunks, never the true objective.
class IncrementalOptimizer {
public:
    IncrementalOptimizer(const VariantSpec& variant, const AlgorithmSettings& settings, std::uint64_t algo_seed);

    StepResult step(const DataChunk& chunk);

    std::size_t environments_seen() const { return seen_; }

private:
    VariantSpec variant_;
    AlgorithmSettings settings_;
    std::uint64_t seed_;
    Rng rng_;
    std::vector<DataChunk> history_;
    std::optional<Population> previous_;
    std::size_t seen_ = 0;
};

struct EnvRecord {
    std::size_t env = 0;
    Vector final_x;
    double true_value = 0.0;

    bool operator==(const EnvRecord&) const = default;
};

struct RunRecord {
    VariantId variant = VariantId::SS;
    ProblemId problem = ProblemId::F1;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    std::vector<EnvRecord> per_env;
    double mean_true_value = 0.0;

    bool operator==(const RunRecord&) const = default;
};

/// What one environment of run_variant did, for instrumentation.
struct EnvTrace {
    const DataChunk& chunk;
    const StepResult& step;
    double true_value;
    /// evaluate_true calls made during this environment.
    std::size_t true_evaluations;
};

using EnvObserver = std::function<void(const EnvTrace&)>;

RunRecord run_variant(const VariantSpec& variant, ProblemId problem, const ProtocolSettings& protocol,
                      const AlgorithmSettings& settings, std::uint64_t run_seed, std::size_t run_index = 0,
                      const EnvObserver& observer = {});

struct ExperimentConfig {
    std::vector<ProblemId> problems{std::begin(kAllProblems), std::end(kAllProblems)};
    std::vector<VariantId> variants{std::begin(kAllVariants), std::end(kAllVariants)};
    ProtocolSettings protocol;
    AlgorithmSettings algorithm;
    std::uint64_t master_seed = 0;
    int parallelism = 1;
};

struct CellResult {
    ProblemId problem;
    VariantId variant;
    double mean = 0.0;
    std::size_t completed_runs = 0;
    std::vector<std::string> errors;
};

struct ExperimentReport {
    std::vector<RunRecord> records;
    std::vector<CellResult> cells;

    const CellResult& cell(ProblemId p, VariantId v) const;
};

/// Runs every (problem, variant, run) combination. Execution::parallel spreads
/// runs over `cfg.parallelism` OpenMP threads; results do not depend on the
/// execution order. A failing run is recorded in its cell and skipped.
ExperimentReport run_experiment(const ExperimentConfig& cfg, Execution exec = Execution::serial);

struct SummaryRow {
    ProblemId problem;
    VariantId variant;
    double mean = 0.0;
    /// Sample standard deviation (n - 1); 0 when n == 1.
    double sd = 0.0;
    std::size_t runs = 0;
    bool single_sample = false;
    /// Other variants on the same problem with a strictly larger mean.
    std::size_t wins = 0;
};

std::vector<SummaryRow> summarize(std::span<const RunRecord> records);

/// Problems as rows, variants as columns.
std::string format_table(std::span<const SummaryRow> rows);

}  // namespace driftopt
