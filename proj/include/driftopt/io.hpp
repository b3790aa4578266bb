#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftopt/core_data.hpp"
#include "driftopt/ensemble.hpp"
#include "driftopt/harness.hpp"

namespace driftopt::io {

using nlohmann::json;

// Chunk stream: one JSON document per environment, newline-delimited.
//   {"env_index": 3, "bounds": [[lo, hi], ...], "points": [{"x": [...], "y": ...}, ...]}
json chunk_to_json(const DataChunk& chunk);
/// Parses and validates one chunk document.
DataChunk chunk_from_json(const json& doc);
void write_chunk_stream(std::ostream& os, std::span<const DataChunk> chunks);
std::vector<DataChunk> read_chunk_stream(std::istream& is);

/// Per-model centers, width, output weights, bias, RMSE and ensemble weight.
json ensemble_to_json(const EnsembleSurrogate& e);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// problem,variant,run,seed,env,true_value,x0,...,x{d-1}; one row per environment.
void write_results_csv(std::ostream& os, std::span<const RunRecord> records);
std::vector<RunRecord> read_results_csv(std::istream& is);

/// problem,variant,mean,sd,runs
void write_summary_csv(std::ostream& os, std::span<const SummaryRow> rows);

/// Experiment config with sections problems, variants, protocol, de, rbf,
/// ensemble. Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig config_from_json(const json& doc);
json config_to_json(const ExperimentConfig& cfg);

/// Applies "section.key=value" to a config document. The value is parsed as
/// JSON when possible and kept as a string otherwise.
void apply_override(json& doc, const std::string& assignment);

}  // namespace driftopt::io
