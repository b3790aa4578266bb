#include "driftopt/io.hpp"

#include <fmt/format.h>

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "driftopt/error.hpp"

namespace driftopt::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(std::move(cur));
    return out;
}

double parse_double(const std::string& s, std::size_t line) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size()) {
        throw ValidationError(fmt::format("results CSV line {}: '{}' is not a number", line, s), line);
    }
    return v;
}

std::uint64_t parse_u64(const std::string& s, std::size_t line) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw ValidationError(fmt::format("results CSV line {}: '{}' is not an unsigned integer", line, s), line);
    }
    return v;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const char* section) {
    if (!obj.is_object()) throw ValidationError(fmt::format("config: '{}' must be an object", section));
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ValidationError(fmt::format("config: unknown key '{}' in '{}'", key, section));
    }
}

template <typename T>
void read_opt(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

json chunk_to_json(const DataChunk& chunk) {
    json bounds = json::array();
    for (std::size_t j = 0; j < chunk.bounds.dim(); ++j) {
        bounds.push_back({chunk.bounds.lower[j], chunk.bounds.upper[j]});
    }
    json points = json::array();
    for (std::size_t i = 0; i < chunk.size(); ++i) points.push_back({{"x", chunk.xs[i]}, {"y", chunk.ys[i]}});
    return {{"env_index", chunk.env_index}, {"bounds", std::move(bounds)}, {"points", std::move(points)}};
}

DataChunk chunk_from_json(const json& doc) {
    try {
        DataChunk c;
        c.env_index = doc.at("env_index").get<std::size_t>();
        for (const auto& b : doc.at("bounds")) {
            if (!b.is_array() || b.size() != 2) throw ValidationError("chunk: each bound must be a [lower, upper] pair");
            c.bounds.lower.push_back(b[0].get<double>());
            c.bounds.upper.push_back(b[1].get<double>());
        }
        for (const auto& p : doc.at("points")) {
            c.xs.push_back(p.at("x").get<Vector>());
            c.ys.push_back(p.at("y").get<double>());
        }
        return validate_chunk(std::move(c));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed chunk document: ") + e.what());
    }
}

void write_chunk_stream(std::ostream& os, std::span<const DataChunk> chunks) {
    for (const auto& c : chunks) os << chunk_to_json(c).dump() << '\n';
}

std::vector<DataChunk> read_chunk_stream(std::istream& is) {
    std::vector<DataChunk> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json doc;
        try {
            doc = json::parse(line);
        } catch (const json::exception& e) {
            throw ValidationError(fmt::format("chunk stream line {}: {}", lineno, e.what()), lineno);
        }
        out.push_back(chunk_from_json(doc));
    }
    return out;
}

json ensemble_to_json(const EnsembleSurrogate& e) {
    json models = json::array();
    for (std::size_t i = 0; i < e.size(); ++i) {
        const RbfModel& m = e.base_models()[i];
        json centers = json::array();
        for (std::size_t j = 0; j < m.num_centers(); ++j) {
            auto c = m.center(j);
            centers.push_back(Vector(c.begin(), c.end()));
        }
        models.push_back({{"centers", std::move(centers)},
                          {"width", m.width()},
                          {"out_weights", m.out_weights()},
                          {"bias", m.bias()},
                          {"rmse", e.rmses()[i]},
                          {"weight", e.weights()[i]}});
    }
    return {{"env_index", e.env_index()}, {"models", std::move(models)}};
}

std::string format_double(double v) { return fmt::format("{}", v); }

void write_results_csv(std::ostream& os, std::span<const RunRecord> records) {
    std::size_t dim = 0;
    for (const auto& r : records) {
        for (const auto& e : r.per_env) dim = std::max(dim, e.final_x.size());
    }
    os << "problem,variant,run,seed,env,true_value";
    for (std::size_t j = 0; j < dim; ++j) os << ",x" << j;
    os << '\n';
    for (const auto& r : records) {
        for (const auto& e : r.per_env) {
            os << to_string(r.problem) << ',' << to_string(r.variant) << ',' << r.run << ',' << r.seed << ','
               << e.env << ',' << format_double(e.true_value);
            for (double x : e.final_x) os << ',' << format_double(x);
            os << '\n';
        }
    }
}

std::vector<RunRecord> read_results_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("results CSV is empty");
    const auto header = split_csv_line(line);
    static const char* kFixed[] = {"problem", "variant", "run", "seed", "env", "true_value"};
    if (header.size() < 6) throw ValidationError("results CSV header is too short");
    for (std::size_t i = 0; i < 6; ++i) {
        if (header[i] != kFixed[i]) {
            throw ValidationError(fmt::format("results CSV header column {} should be '{}'", i, kFixed[i]), i);
        }
    }

    std::vector<RunRecord> out;
    std::map<std::tuple<ProblemId, VariantId, std::size_t>, std::size_t> index;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() < 6) throw ValidationError(fmt::format("results CSV line {} has too few columns", lineno), lineno);
        const ProblemId p = parse_problem(f[0]);
        const VariantId v = parse_variant(f[1]);
        const std::size_t run = parse_u64(f[2], lineno);
        const auto key = std::make_tuple(p, v, run);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, out.size()).first;
            out.push_back(RunRecord{v, p, run, parse_u64(f[3], lineno), {}, 0.0});
        }
        EnvRecord e;
        e.env = parse_u64(f[4], lineno);
        e.true_value = parse_double(f[5], lineno);
        for (std::size_t j = 6; j < f.size(); ++j) {
            if (!f[j].empty()) e.final_x.push_back(parse_double(f[j], lineno));
        }
        out[it->second].per_env.push_back(std::move(e));
    }
    for (auto& r : out) {
        double sum = 0.0;
        for (const auto& e : r.per_env) sum += e.true_value;
        r.mean_true_value = sum / static_cast<double>(r.per_env.size());
    }
    return out;
}

void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows) {
    os << "problem,variant,mean,sd,runs\n";
    for (const auto& r : rows) {
        os << to_string(r.problem) << ',' << to_string(r.variant) << ',' << format_double(r.mean) << ','
           << format_double(r.sd) << ',' << r.runs << '\n';
    }
}

ExperimentConfig config_from_json(const json& doc) {
    ExperimentConfig cfg;
    try {
        check_keys(doc, {"problems", "variants", "protocol", "de", "rbf", "ensemble", "parallelism"}, "<root>");
        if (doc.contains("problems")) {
            cfg.problems.clear();
            for (const auto& p : doc.at("problems")) cfg.problems.push_back(parse_problem(p.get<std::string>()));
        }
        if (doc.contains("variants")) {
            cfg.variants.clear();
            for (const auto& v : doc.at("variants")) cfg.variants.push_back(parse_variant(v.get<std::string>()));
        }
        read_opt(doc, "parallelism", cfg.parallelism);
        if (doc.contains("protocol")) {
            const auto& p = doc.at("protocol");
            check_keys(p, {"dim", "envs", "runs", "master_seed", "sampling", "shift_severity_fraction",
                           "value_severity"},
                       "protocol");
            read_opt(p, "dim", cfg.protocol.dim);
            read_opt(p, "envs", cfg.protocol.envs);
            read_opt(p, "runs", cfg.protocol.runs);
            read_opt(p, "master_seed", cfg.master_seed);
            if (p.contains("sampling")) cfg.protocol.sampling = parse_sampling(p.at("sampling").get<std::string>());
            read_opt(p, "shift_severity_fraction", cfg.protocol.severity.shift_fraction);
            read_opt(p, "value_severity", cfg.protocol.severity.value);
        }
        if (doc.contains("de")) {
            const auto& d = doc.at("de");
            check_keys(d, {"np", "f", "cr", "generations", "bound_handling", "elite_fraction"}, "de");
            read_opt(d, "np", cfg.algorithm.de.np);
            read_opt(d, "f", cfg.algorithm.de.f);
            read_opt(d, "cr", cfg.algorithm.de.cr);
            read_opt(d, "generations", cfg.algorithm.de.generations);
            if (d.contains("bound_handling") && d.at("bound_handling").get<std::string>() != "reflect") {
                throw ValidationError("config: de.bound_handling supports only 'reflect'");
            }
            read_opt(d, "elite_fraction", cfg.algorithm.elite_fraction);
        }
        if (doc.contains("rbf")) {
            const auto& r = doc.at("rbf");
            check_keys(r, {"max_centers", "ridge", "kmeans_iters"}, "rbf");
            if (r.contains("max_centers")) {
                const auto& mc = r.at("max_centers");
                if (mc.is_string()) {
                    if (mc.get<std::string>() != "auto") throw ValidationError("config: rbf.max_centers must be 'auto' or an integer");
                    cfg.algorithm.rbf.max_centers = 0;
                } else {
                    cfg.algorithm.rbf.max_centers = mc.get<std::size_t>();
                }
            }
            read_opt(r, "ridge", cfg.algorithm.rbf.ridge);
            read_opt(r, "kmeans_iters", cfg.algorithm.rbf.kmeans_iters);
        }
        if (doc.contains("ensemble")) {
            const auto& e = doc.at("ensemble");
            check_keys(e, {"rmse_eval", "max_history"}, "ensemble");
            if (e.contains("rmse_eval")) {
                const auto s = e.at("rmse_eval").get<std::string>();
                if (s == "current") cfg.algorithm.ensemble.rmse_eval = RmseEval::current;
                else if (s == "transferred") cfg.algorithm.ensemble.rmse_eval = RmseEval::transferred;
                else throw ValidationError("config: ensemble.rmse_eval must be 'current' or 'transferred'");
            }
            read_opt(e, "max_history", cfg.algorithm.ensemble.max_history);
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed config: ") + e.what());
    }
    validate_params(cfg.algorithm.de);
    if (cfg.parallelism < 1) throw ValidationError("config: parallelism must be at least 1");
    if (cfg.protocol.dim == 0 || cfg.protocol.envs == 0 || cfg.protocol.runs == 0) {
        throw ValidationError("config: protocol.dim, envs and runs must be positive");
    }
    if (cfg.algorithm.rbf.ridge < 0.0 || cfg.algorithm.rbf.kmeans_iters < 1) {
        throw ValidationError("config: rbf.ridge must be >= 0 and rbf.kmeans_iters >= 1");
    }
    if (!(cfg.algorithm.elite_fraction > 0.0 && cfg.algorithm.elite_fraction <= 1.0)) {
        throw ValidationError("config: de.elite_fraction must lie in (0, 1]");
    }
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json problems = json::array();
    for (auto p : cfg.problems) problems.push_back(std::string(to_string(p)));
    json variants = json::array();
    for (auto v : cfg.variants) variants.push_back(std::string(to_string(v)));
    const auto& a = cfg.algorithm;
    json max_centers = a.rbf.max_centers == 0 ? json("auto") : json(a.rbf.max_centers);
    return {
        {"problems", problems},
        {"variants", variants},
        {"parallelism", cfg.parallelism},
        {"protocol",
         {{"dim", cfg.protocol.dim},
          {"envs", cfg.protocol.envs},
          {"runs", cfg.protocol.runs},
          {"master_seed", cfg.master_seed},
          {"sampling", std::string(to_string(cfg.protocol.sampling))},
          {"shift_severity_fraction", cfg.protocol.severity.shift_fraction},
          {"value_severity", cfg.protocol.severity.value}}},
        {"de",
         {{"np", a.de.np},
          {"f", a.de.f},
          {"cr", a.de.cr},
          {"generations", a.de.generations},
          {"bound_handling", "reflect"},
          {"elite_fraction", a.elite_fraction}}},
        {"rbf", {{"max_centers", max_centers}, {"ridge", a.rbf.ridge}, {"kmeans_iters", a.rbf.kmeans_iters}}},
        {"ensemble",
         {{"rmse_eval", a.ensemble.rmse_eval == RmseEval::current ? "current" : "transferred"},
          {"max_history", a.ensemble.max_history}}},
    };
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ValidationError("override '" + assignment + "' is not of the form section.key=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }
    std::string pointer;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) pointer += "/" + part;
    doc[json::json_pointer(pointer)] = std::move(value);
}

}  // namespace driftopt::io
