#include "driftopt/core_data.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "driftopt/error.hpp"

namespace driftopt {

bool Bounds::contains(std::span<const double> x) const {
    if (x.size() != dim()) return false;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (!(x[j] >= lower[j] && x[j] <= upper[j])) return false;
    }
    return true;
}

DataChunk validate_chunk(DataChunk chunk) {
    const auto& b = chunk.bounds;
    if (b.lower.size() != b.upper.size()) {
        throw ValidationError("bounds: lower has " + std::to_string(b.lower.size()) +
                              " entries but upper has " + std::to_string(b.upper.size()));
    }
    if (b.dim() == 0) throw ValidationError("bounds: zero-dimensional decision space");
    for (std::size_t j = 0; j < b.dim(); ++j) {
        if (!(b.lower[j] < b.upper[j])) {
            throw ValidationError("degenerate bounds at dimension " + std::to_string(j), j);
        }
    }
    if (chunk.xs.size() != chunk.ys.size()) {
        throw ValidationError("length mismatch: " + std::to_string(chunk.xs.size()) + " points but " +
                                  std::to_string(chunk.ys.size()) + " objective values",
                              std::min(chunk.xs.size(), chunk.ys.size()));
    }
    if (chunk.size() < 2) {
        throw ValidationError("chunk needs at least 2 points, got " + std::to_string(chunk.size()),
                              chunk.size());
    }
    for (std::size_t i = 0; i < chunk.xs.size(); ++i) {
        const auto& x = chunk.xs[i];
        if (x.size() != b.dim()) {
            throw ValidationError("dimension mismatch at point " + std::to_string(i) + ": expected " +
                                      std::to_string(b.dim()) + ", got " + std::to_string(x.size()),
                                  i);
        }
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (!(x[j] >= b.lower[j] && x[j] <= b.upper[j])) {
                throw ValidationError("point " + std::to_string(i) + " out of bounds in dimension " +
                                          std::to_string(j),
                                      i);
            }
        }
        if (!std::isfinite(chunk.ys[i])) {
            throw ValidationError("non-finite objective value at point " + std::to_string(i), i);
        }
    }
    return chunk;
}

ChunkStats chunk_stats(std::span<const double> ys) {
    if (ys.empty()) throw ValidationError("chunk_stats of an empty set");
    auto [lo, hi] = std::minmax_element(ys.begin(), ys.end());
    return {*lo, *hi};
}

ChunkStats chunk_stats(const DataChunk& chunk) { return chunk_stats(std::span<const double>(chunk.ys)); }

}  // namespace driftopt
