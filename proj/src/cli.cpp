#include "driftopt/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "driftopt/error.hpp"
#include "driftopt/harness.hpp"
#include "driftopt/io.hpp"

namespace driftopt::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    std::optional<std::size_t> max_history;
    std::string rmse_eval;
    std::string sampling;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "Experiment config (JSON)");
    cmd->add_option("--seed", o.seed, "Master seed (falls back to DRIFTOPT_SEED, then the config)");
    cmd->add_option("--set", o.overrides, "Config override section.key=value (repeatable)");
    cmd->add_option("--max-history", o.max_history, "Keep only the most recent N historical chunks (0 = all)");
    cmd->add_option("--rmse-eval", o.rmse_eval, "Base-model RMSE evaluation set")
        ->check(CLI::IsMember({"current", "transferred"}));
    cmd->add_option("--sampling", o.sampling, "Chunk sampling design")->check(CLI::IsMember({"lhs", "uniform"}));
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("malformed config '" + path + "': " + e.what());
    }
}

ExperimentConfig resolve_config(const CommonOptions& o, bool config_required) {
    json doc = json::object();
    if (!o.config_path.empty()) {
        doc = read_json_file(o.config_path);
    } else if (config_required) {
        throw ValidationError("--config is required");
    }
    for (const auto& ov : o.overrides) io::apply_override(doc, ov);
    if (o.max_history) doc["ensemble"]["max_history"] = *o.max_history;
    if (!o.rmse_eval.empty()) doc["ensemble"]["rmse_eval"] = o.rmse_eval;
    if (!o.sampling.empty()) doc["protocol"]["sampling"] = o.sampling;
    ExperimentConfig cfg = io::config_from_json(doc);

    if (o.seed) {
        cfg.master_seed = *o.seed;
    } else if (const char* env = std::getenv("DRIFTOPT_SEED"); env != nullptr && *env != '\0') {
        try {
            std::size_t pos = 0;
            cfg.master_seed = std::stoull(env, &pos);
            if (pos != std::string(env).size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw ValidationError(std::string("DRIFTOPT_SEED is not an unsigned integer: '") + env + "'");
        }
    }
    return cfg;
}

fs::path prepare_output_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec || !fs::is_directory(p)) throw Error("cannot create output directory '" + dir + "'");
    return p;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + path.string() + "'");
    return f;
}

int cmd_run(const CommonOptions& o, const std::string& out_dir, std::optional<int> parallelism, std::ostream& out,
            std::ostream& err) {
    ExperimentConfig cfg = resolve_config(o, true);
    if (parallelism) cfg.parallelism = *parallelism;
    if (cfg.parallelism < 1) throw ValidationError("--parallelism must be at least 1");
    const fs::path dir = prepare_output_dir(out_dir);
    auto results = open_output(dir / "results.csv");
    auto summary = open_output(dir / "summary.csv");

    cfg.algorithm.exec = Execution::serial;
    const ExperimentReport report =
        run_experiment(cfg, cfg.parallelism > 1 ? Execution::parallel : Execution::serial);

    io::write_results_csv(results, report.records);
    std::size_t failures = 0;
    for (const auto& c : report.cells) failures += c.errors.size();
    if (!report.records.empty()) {
        const auto rows = summarize(report.records);
        io::write_summary_csv(summary, rows);
        out << format_table(rows);
    } else {
        summary << "problem,variant,mean,sd,runs\n";
    }
    auto resolved = open_output(dir / "config.json");
    resolved << io::config_to_json(cfg).dump(2) << '\n';
    if (!results || !summary || !resolved) throw Error("failed writing results to '" + out_dir + "'");

    if (failures > 0) {
        for (const auto& c : report.cells) {
            for (const auto& e : c.errors) err << "warning: " << to_string(c.problem) << '/' << to_string(c.variant) << ' ' << e << '\n';
        }
        err << "error: " << failures << " run(s) failed; partial results written to " << out_dir << '\n';
        return 1;
    }
    return 0;
}

int cmd_replay(const CommonOptions& o, const std::string& chunks_path, const std::string& variant_name,
               const std::string& problem_name, std::size_t run_index, const std::string& out_dir,
               const std::string& dump_models, std::ostream& out) {
    const ExperimentConfig cfg = resolve_config(o, false);
    std::ifstream in(chunks_path);
    if (!in) throw Error("cannot open chunk stream '" + chunks_path + "'");
    const auto chunks = io::read_chunk_stream(in);
    if (chunks.empty()) throw ValidationError("chunk stream '" + chunks_path + "' holds no chunks");

    const VariantSpec variant = VariantSpec::of(parse_variant(variant_name));
    const std::uint64_t seed = run_seed(cfg.master_seed, parse_problem(problem_name), run_index);
    AlgorithmSettings settings = cfg.algorithm;
    settings.exec = Execution::serial;
    IncrementalOptimizer opt(variant, settings, algorithm_seed(seed));

    std::ostringstream csv;
    const std::size_t dim = chunks.front().dim();
    csv << "variant,env,surrogate_value";
    for (std::size_t j = 0; j < dim; ++j) csv << ",x" << j;
    csv << '\n';
    std::optional<fs::path> model_dir;
    if (!dump_models.empty()) model_dir = prepare_output_dir(dump_models);
    for (const auto& chunk : chunks) {
        const StepResult step = opt.step(chunk);
        csv << to_string(variant.id) << ',' << step.env_index << ',' << io::format_double(step.final.surrogate_value);
        for (double x : step.final.x) csv << ',' << io::format_double(x);
        csv << '\n';
        if (model_dir) {
            auto f = open_output(*model_dir / fmt::format("ensemble_env{:04d}.json", step.env_index));
            f << io::ensemble_to_json(step.surrogate).dump(2) << '\n';
        }
    }
    if (out_dir.empty()) {
        out << csv.str();
    } else {
        auto f = open_output(prepare_output_dir(out_dir) / "replay.csv");
        f << csv.str();
        if (!f) throw Error("failed writing replay output");
    }
    return 0;
}

int cmd_report(const std::string& results_path, const std::string& summary_path, std::ostream& out) {
    std::ifstream in(results_path);
    if (!in) throw Error("cannot open results file '" + results_path + "'");
    const auto records = io::read_results_csv(in);
    const auto rows = summarize(records);
    out << format_table(rows);
    if (!summary_path.empty()) {
        auto f = open_output(summary_path);
        io::write_summary_csv(f, rows);
    }
    return 0;
}

int cmd_dump_chunks(const CommonOptions& o, const std::string& problem_name, std::size_t run_index,
                    std::optional<std::size_t> envs, const std::string& out_path, std::ostream& out) {
    ExperimentConfig cfg = resolve_config(o, false);
    if (envs) cfg.protocol.envs = *envs;
    if (cfg.protocol.envs == 0) throw ValidationError("--envs must be positive");
    const ProblemId problem = parse_problem(problem_name);
    const auto chunks = generate_chunks(problem, cfg.protocol, run_seed(cfg.master_seed, problem, run_index));
    if (out_path.empty() || out_path == "-") {
        io::write_chunk_stream(out, chunks);
    } else {
        const fs::path p(out_path);
        if (p.has_parent_path()) prepare_output_dir(p.parent_path().string());
        auto f = open_output(p);
        io::write_chunk_stream(f, chunks);
        if (!f) throw Error("failed writing '" + out_path + "'");
    }
    return 0;
}

}  // namespace

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Incremental offline data-driven optimization in nonstationary environments", "driftopt"};
    app.require_subcommand(1);

    CommonOptions run_opts, replay_opts, dump_opts;
    std::string run_out = "results";
    std::optional<int> parallelism;
    auto* run = app.add_subcommand("run", "Run an experiment from a config file");
    add_common(run, run_opts);
    run->add_option("--out", run_out, "Output directory");
    run->add_option("--parallelism", parallelism, "Worker threads for experiment runs");

    std::string chunks_path, variant = "KTSPI_TBA", replay_problem = "F1", replay_out, dump_models;
    std::size_t replay_run = 0;
    auto* replay = app.add_subcommand("replay", "Run one variant over a dumped chunk stream");
    add_common(replay, replay_opts);
    replay->add_option("chunks,--chunks", chunks_path, "Chunk stream (newline-delimited JSON)")->required();
    replay->add_option("--variant", variant, "SS, KTS, KTSPI or KTSPI_TBA");
    replay->add_option("--problem", replay_problem, "Problem the stream was dumped from (seed derivation)");
    replay->add_option("--run", replay_run, "Run index the stream was dumped from (seed derivation)");
    replay->add_option("--out", replay_out, "Output directory for replay.csv (default: standard output)");
    replay->add_option("--dump-models", dump_models, "Directory for per-environment ensemble JSON dumps");

    std::string results_path, summary_path;
    auto* report = app.add_subcommand("report", "Summarize an existing results CSV");
    report->add_option("results", results_path, "results.csv written by `run`")->required();
    report->add_option("--summary", summary_path, "Also write the summary CSV here");

    std::string dump_problem, dump_out;
    std::size_t dump_run = 0;
    std::optional<std::size_t> dump_envs;
    auto* dump = app.add_subcommand("dump-chunks", "Write the chunk stream of one problem and run");
    add_common(dump, dump_opts);
    dump->add_option("--problem", dump_problem, "F1..F6")->required();
    dump->add_option("--run", dump_run, "Run index");
    dump->add_option("--envs", dump_envs, "Number of environments (default: from config)");
    dump->add_option("--out", dump_out, "Output file (default: standard output)");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
    }

    try {
        if (*run) return cmd_run(run_opts, run_out, parallelism, out, err);
        if (*replay) {
            return cmd_replay(replay_opts, chunks_path, variant, replay_problem, replay_run, replay_out, dump_models,
                              out);
        }
        if (*report) return cmd_report(results_path, summary_path, out);
        if (*dump) return cmd_dump_chunks(dump_opts, dump_problem, dump_run, dump_envs, dump_out, out);
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (auto& c : msg) {
            if (c == '\n') c = ' ';
        }
        err << "error: " << msg << '\n';
        return 1;
    }
    return 1;
}

}  // namespace driftopt::cli
