#pragma once

#include <cstddef>
#include <vector>

#include "driftopt/core_data.hpp"

namespace driftopt {

/// A historical chunk whose objective values have been mapped into the
/// current environment's [y_min, y_max]. Decision vectors are untouched.
struct TransferredChunk {
    std::size_t source_env = 0;
    std::vector<Vector> xs;
    Vector ys_transferred;
};

/// Min-max affine map of one value from `source` range onto `target` range.
/// A constant source range maps every value to the target midpoint.
double rescale_value(double y, const ChunkStats& source, const ChunkStats& target);

TransferredChunk rescale_objectives(const DataChunk& source, const ChunkStats& target_stats);

/// Historical rows first, then the current chunk's rows.
SampleSet build_training_set(const TransferredChunk& hist, const DataChunk& current);

}  // namespace driftopt
