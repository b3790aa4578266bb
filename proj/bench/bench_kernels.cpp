// Serial reference vs OpenMP paths of the data-parallel kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "driftopt/benchmark_suite.hpp"
#include "driftopt/de.hpp"
#include "driftopt/ensemble.hpp"
#include "driftopt/harness.hpp"

namespace {

using namespace driftopt;

std::vector<DataChunk> make_stream(std::size_t envs) {
    ProtocolSettings protocol;
    protocol.envs = envs;
    return generate_chunks(ProblemId::F2, protocol, 11);
}

void BM_UpdateEnsemble(benchmark::State& state) {
    const auto chunks = make_stream(static_cast<std::size_t>(state.range(0)));
    const std::span<const DataChunk> history(chunks.data(), chunks.size() - 1);
    const auto exec = state.range(1) ? Execution::parallel : Execution::serial;
    for (auto _ : state) {
        auto e = update_ensemble(history, chunks.back(), {}, {}, 5, exec);
        benchmark::DoNotOptimize(e.weights().data());
    }
    state.SetLabel(exec == Execution::parallel ? "openmp" : "serial");
}
BENCHMARK(BM_UpdateEnsemble)->ArgsProduct({{5, 20}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_OptimizeOnEnsemble(benchmark::State& state) {
    const auto chunks = make_stream(static_cast<std::size_t>(state.range(0)));
    const std::span<const DataChunk> history(chunks.data(), chunks.size() - 1);
    const auto surrogate = update_ensemble(history, chunks.back(), {}, {}, 5);
    const Objective obj = [&](std::span<const double> x) { return surrogate.predict(x); };
    const auto exec = state.range(1) ? Execution::parallel : Execution::serial;
    const DeParams params;
    for (auto _ : state) {
        Rng rng = make_rng(3);
        auto init = init_population(InitStrategy::random, chunks.back().bounds, params.np, nullptr, rng);
        auto pop = optimize(obj, std::move(init), params, chunks.back().bounds, rng, exec);
        benchmark::DoNotOptimize(pop.members.data());
    }
    state.SetLabel(exec == Execution::parallel ? "openmp" : "serial");
}
BENCHMARK(BM_OptimizeOnEnsemble)->ArgsProduct({{1, 10}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_RunExperiment(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.problems = {ProblemId::F1, ProblemId::F5};
    cfg.protocol.envs = 3;
    cfg.protocol.runs = 2;
    cfg.algorithm.de.generations = 20;
    cfg.parallelism = 4;
    const auto exec = state.range(0) ? Execution::parallel : Execution::serial;
    for (auto _ : state) {
        auto report = run_experiment(cfg, exec);
        benchmark::DoNotOptimize(report.cells.data());
    }
    state.SetLabel(exec == Execution::parallel ? "openmp" : "serial");
}
BENCHMARK(BM_RunExperiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
