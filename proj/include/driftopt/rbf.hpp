#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "driftopt/core_data.hpp"
#include "driftopt/rng.hpp"

namespace driftopt {

/// Hyperparameters of the Gaussian RBF network. None of these are fixed by
/// the method itself; the defaults are repository choices.
struct RbfConfig {
    /// Upper bound on the number of centers. 0 selects min(n, 2 * d).
    std::size_t max_centers = 0;
    /// Ridge penalty on the Gaussian output weights (the bias is unpenalized).
    double ridge = 1e-8;
    int kmeans_iters = 50;
};

/// Trained Gaussian RBF network with one shared width:
///   y(x) = bias + sum_j w_j * exp(-|x - c_j|^2 / (2 sigma^2))
/// Immutable after construction; safe for concurrent prediction.
class RbfModel {
public:
    RbfModel(std::vector<Vector> centers, double width, Vector out_weights, double bias);

    double predict(std::span<const double> x) const;

    std::size_t dim() const { return dim_; }
    std::size_t num_centers() const { return weights_.size(); }
    std::span<const double> center(std::size_t j) const {
        return {centers_.data() + j * dim_, dim_};
    }
    double width() const { return width_; }
    const Vector& out_weights() const { return weights_; }
    double bias() const { return bias_; }

    bool operator==(const RbfModel&) const = default;

private:
    std::size_t dim_;
    Vector centers_;  // row-major, num_centers x dim
    double width_;
    double inv_two_width_sq_;
    Vector weights_;
    double bias_;
};

/// k-means++ seeding followed by at most `iters` Lloyd iterations. Requires k
/// to be at most the number of distinct points; returns k distinct centers.
std::vector<Vector> kmeans_centers(std::span<const Vector> points, std::size_t k, int iters, Rng& rng);

std::size_t count_distinct(std::span<const Vector> points);

RbfModel train_rbf(std::span<const Vector> xs, std::span<const double> ys, const RbfConfig& cfg, Rng& rng);
inline RbfModel train_rbf(const SampleSet& s, const RbfConfig& cfg, Rng& rng) {
    return train_rbf(s.xs, s.ys, cfg, rng);
}

/// Throws ValidationError when x has the wrong dimension.
double predict_rbf(const RbfModel& model, std::span<const double> x);

/// Root-mean-square prediction error over a non-empty evaluation set.
double rmse(const RbfModel& model, std::span<const Vector> xs, std::span<const double> ys);

}  // namespace driftopt
