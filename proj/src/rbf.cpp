#include "driftopt/rbf.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "driftopt/error.hpp"

namespace driftopt {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

bool pairwise_distinct(const std::vector<Vector>& centers) {
    for (std::size_t a = 0; a < centers.size(); ++a) {
        for (std::size_t b = a + 1; b < centers.size(); ++b) {
            if (centers[a] == centers[b]) return false;
        }
    }
    return true;
}

// Index of the nearest center; ties go to the lowest index.
std::size_t nearest(std::span<const double> x, const std::vector<Vector>& centers, double* dist = nullptr) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        const double d = squared_distance(x, centers[c]);
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist) *dist = best_d;
    return best;
}

}  // namespace

RbfModel::RbfModel(std::vector<Vector> centers, double width, Vector out_weights, double bias)
    : dim_(centers.empty() ? 0 : centers.front().size()),
      width_(width),
      inv_two_width_sq_(1.0 / (2.0 * width * width)),
      weights_(std::move(out_weights)),
      bias_(bias) {
    if (centers.empty()) throw ValidationError("RBF model needs at least one center");
    if (!(width > 0.0) || !std::isfinite(width)) throw ValidationError("RBF width must be positive and finite");
    if (centers.size() != weights_.size()) {
        throw ValidationError("RBF model: " + std::to_string(centers.size()) + " centers but " +
                              std::to_string(weights_.size()) + " output weights");
    }
    centers_.reserve(centers.size() * dim_);
    for (std::size_t j = 0; j < centers.size(); ++j) {
        if (centers[j].size() != dim_) throw ValidationError("RBF center dimension mismatch", j);
        centers_.insert(centers_.end(), centers[j].begin(), centers[j].end());
    }
}

double RbfModel::predict(std::span<const double> x) const {
    double y = bias_;
    const double* c = centers_.data();
    for (std::size_t j = 0; j < weights_.size(); ++j, c += dim_) {
        double s = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            const double d = x[i] - c[i];
            s += d * d;
        }
        y += weights_[j] * std::exp(-s * inv_two_width_sq_);
    }
    return y;
}

std::size_t count_distinct(std::span<const Vector> points) {
    std::vector<Vector> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

std::vector<Vector> kmeans_centers(std::span<const Vector> points, std::size_t k, int iters, Rng& rng) {
    if (k == 0) throw ValidationError("kmeans_centers: k must be positive");
    const std::size_t distinct = count_distinct(points);
    if (k > distinct) {
        throw ValidationError("kmeans_centers: k = " + std::to_string(k) + " exceeds the " +
                              std::to_string(distinct) + " distinct points");
    }
    const std::size_t n = points.size();
    const std::size_t d = points.front().size();

    // k-means++ seeding. Already-chosen points have zero weight, so every
    // draw lands on a new distinct point while any remain.
    std::vector<Vector> centers;
    centers.reserve(k);
    centers.push_back(points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
    std::vector<double> d2(n);
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest(points[i], centers, &d2[i]);
            total += d2[i];
        }
        double r = uniform01(rng) * total;
        std::size_t pick = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (d2[i] <= 0.0) continue;
            pick = i;
            r -= d2[i];
            if (r < 0.0) break;
        }
        centers.push_back(points[pick]);
    }

    std::vector<std::size_t> assign(n);
    for (int it = 0; it < iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) assign[i] = nearest(points[i], centers);

        std::vector<Vector> next(k, Vector(d, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& acc = next[assign[i]];
            for (std::size_t j = 0; j < d; ++j) acc[j] += points[i][j];
            ++counts[assign[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                next[c] = centers[c];
                continue;
            }
            for (auto& v : next[c]) v /= static_cast<double>(counts[c]);
        }
        if (next == centers) break;
        // Distinct centers are an output invariant; a Lloyd step that would
        // merge two of them is rejected and the previous set kept.
        if (!pairwise_distinct(next)) break;
        centers = std::move(next);
    }
    return centers;
}

RbfModel train_rbf(std::span<const Vector> xs, std::span<const double> ys, const RbfConfig& cfg, Rng& rng) {
    if (xs.size() != ys.size()) throw ValidationError("train_rbf: xs and ys differ in length");
    if (xs.size() < 2) throw ValidationError("train_rbf: need at least 2 samples", xs.size());
    const std::size_t n = xs.size();
    const std::size_t d = xs.front().size();
    for (std::size_t i = 0; i < n; ++i) {
        if (xs[i].size() != d) throw ValidationError("train_rbf: dimension mismatch", i);
    }

    const std::size_t cap = cfg.max_centers > 0 ? cfg.max_centers : std::min(n, 2 * d);
    const std::size_t k = std::max<std::size_t>(1, std::min(cap, count_distinct(xs)));
    auto centers = kmeans_centers(xs, k, cfg.kmeans_iters, rng);

    double d_max = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = a + 1; b < k; ++b) {
            d_max = std::max(d_max, std::sqrt(squared_distance(centers[a], centers[b])));
        }
    }
    const double width = (k == 1 || d_max == 0.0) ? 1.0 : d_max / std::sqrt(2.0 * static_cast<double>(k));
    const double inv = 1.0 / (2.0 * width * width);

    // Design matrix: k Gaussian columns followed by the constant column.
    Eigen::MatrixXd phi(n, k + 1);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            phi(i, j) = std::exp(-squared_distance(xs[i], centers[j]) * inv);
        }
        phi(i, k) = 1.0;
        y(i) = ys[i];
    }
    Eigen::MatrixXd gram = phi.transpose() * phi;
    for (std::size_t j = 0; j < k; ++j) gram(j, j) += cfg.ridge;
    const Eigen::VectorXd rhs = phi.transpose() * y;

    Eigen::VectorXd sol;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() == Eigen::Success) {
        sol = llt.solve(rhs);
    } else {
        // Only reachable with ridge = 0 and a rank-deficient design.
        sol = gram.ldlt().solve(rhs);
    }
    if (!sol.allFinite()) throw Error("train_rbf: least-squares solve produced non-finite weights");

    Vector weights(sol.data(), sol.data() + k);
    return RbfModel(std::move(centers), width, std::move(weights), sol(k));
}

double predict_rbf(const RbfModel& model, std::span<const double> x) {
    if (x.size() != model.dim()) {
        throw ValidationError("predict_rbf: expected dimension " + std::to_string(model.dim()) + ", got " +
                              std::to_string(x.size()));
    }
    return model.predict(x);
}

double rmse(const RbfModel& model, std::span<const Vector> xs, std::span<const double> ys) {
    if (ys.empty()) throw ValidationError("rmse over an empty evaluation set");
    if (xs.size() != ys.size()) throw ValidationError("rmse: xs and ys differ in length");
    double acc = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double r = predict_rbf(model, xs[i]) - ys[i];
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(ys.size()));
}

}  // namespace driftopt
