#include "driftopt/transfer.hpp"

#include <algorithm>

#include "driftopt/error.hpp"

namespace driftopt {

double rescale_value(double y, const ChunkStats& source, const ChunkStats& target) {
    const double src_range = source.range();
    if (src_range == 0.0) return 0.5 * (target.y_min + target.y_max);
    const double unit = (y - source.y_min) / src_range;
    // Rounding can overshoot the target range by an ulp at the endpoints.
    return std::clamp(unit * target.range() + target.y_min, target.y_min, target.y_max);
}

TransferredChunk rescale_objectives(const DataChunk& source, const ChunkStats& target_stats) {
    const ChunkStats src = chunk_stats(source);
    TransferredChunk out{source.env_index, source.xs, {}};
    out.ys_transferred.reserve(source.ys.size());
    for (double y : source.ys) out.ys_transferred.push_back(rescale_value(y, src, target_stats));
    return out;
}

SampleSet build_training_set(const TransferredChunk& hist, const DataChunk& current) {
    if (hist.xs.size() < 2 || hist.xs.size() != hist.ys_transferred.size()) {
        throw ValidationError("build_training_set: historical chunk needs at least 2 rows", hist.xs.size());
    }
    for (std::size_t i = 0; i < hist.xs.size(); ++i) {
        if (hist.xs[i].size() != current.dim()) {
            throw ValidationError("build_training_set: historical row " + std::to_string(i) +
                                      " has dimension " + std::to_string(hist.xs[i].size()) +
                                      ", current chunk has " + std::to_string(current.dim()),
                                  i);
        }
    }
    SampleSet out;
    out.xs.reserve(hist.xs.size() + current.size());
    out.ys.reserve(hist.xs.size() + current.size());
    out.xs.insert(out.xs.end(), hist.xs.begin(), hist.xs.end());
    out.ys.insert(out.ys.end(), hist.ys_transferred.begin(), hist.ys_transferred.end());
    out.xs.insert(out.xs.end(), current.xs.begin(), current.xs.end());
    out.ys.insert(out.ys.end(), current.ys.begin(), current.ys.end());
    return out;
}

}  // namespace driftopt
