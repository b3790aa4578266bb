#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace driftopt {

using Vector = std::vector<double>;

/// Axis-aligned box, one (lower, upper) pair per decision variable.
struct Bounds {
    Vector lower;
    Vector upper;

    static Bounds uniform(std::size_t dim, double lo, double hi) {
        return {Vector(dim, lo), Vector(dim, hi)};
    }

    std::size_t dim() const { return lower.size(); }
    double width(std::size_t j) const { return upper[j] - lower[j]; }
    bool contains(std::span<const double> x) const;

    bool operator==(const Bounds&) const = default;
};

/// Plain (x, y) training or evaluation data.
struct SampleSet {
    std::vector<Vector> xs;
    Vector ys;

    std::size_t size() const { return ys.size(); }
    std::size_t dim() const { return xs.empty() ? 0 : xs.front().size(); }
};

/// One environment's offline data. Treated as an immutable value once it has
/// passed `validate_chunk`.
struct DataChunk {
    std::size_t env_index = 0;
    std::vector<Vector> xs;
    Vector ys;
    Bounds bounds;

    std::size_t size() const { return ys.size(); }
    std::size_t dim() const { return bounds.dim(); }
    SampleSet samples() const { return {xs, ys}; }

    bool operator==(const DataChunk&) const = default;
};

struct ChunkStats {
    double y_min = 0.0;
    double y_max = 0.0;

    double range() const { return y_max - y_min; }
};

/// Checks every DataChunk invariant and returns the chunk unchanged. Throws
/// ValidationError carrying the offending row or dimension index.
DataChunk validate_chunk(DataChunk chunk);

/// Exact minimum and maximum of the chunk's objective values.
ChunkStats chunk_stats(const DataChunk& chunk);
ChunkStats chunk_stats(std::span<const double> ys);

}  // namespace driftopt
