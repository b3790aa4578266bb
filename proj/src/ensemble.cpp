#include "driftopt/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <string>

#include "driftopt/error.hpp"
#include "driftopt/transfer.hpp"

namespace driftopt {

Vector ensemble_weights(std::span<const double> rmses) {
    if (rmses.empty()) throw ValidationError("ensemble_weights: need at least one RMSE");
    for (std::size_t i = 0; i < rmses.size(); ++i) {
        if (!(rmses[i] >= 0.0) || !std::isfinite(rmses[i])) {
            throw ValidationError("ensemble_weights: RMSE " + std::to_string(i) + " is negative or non-finite", i);
        }
    }
    const double current = rmses.back();
    Vector w(rmses.size());
    for (std::size_t i = 0; i + 1 < rmses.size(); ++i) w[i] = 1.0 / (rmses[i] + current + kWeightEpsilon);
    w.back() = 1.0 / (current + kWeightEpsilon);
    return w;
}

EnsembleSurrogate::EnsembleSurrogate(std::size_t env_index, std::vector<RbfModel> models, Vector rmses)
    : env_index_(env_index), models_(std::move(models)), rmses_(std::move(rmses)) {
    weights_ = ensemble_weights(rmses_);
    weight_sum_ = checked_weight_sum();
}

EnsembleSurrogate::EnsembleSurrogate(std::size_t env_index, std::vector<RbfModel> models, Vector rmses,
                                     Vector weights)
    : env_index_(env_index), models_(std::move(models)), rmses_(std::move(rmses)), weights_(std::move(weights)) {
    weight_sum_ = checked_weight_sum();
}

double EnsembleSurrogate::checked_weight_sum() const {
    if (models_.empty()) throw ValidationError("ensemble needs at least one base model");
    if (models_.size() != rmses_.size() || models_.size() != weights_.size()) {
        throw ValidationError("ensemble: models, rmses and weights differ in length");
    }
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
            throw ValidationError("ensemble weight " + std::to_string(i) + " is not positive and finite", i);
        }
        if (weights_[i] > weights_.back()) {
            throw ValidationError("ensemble weight " + std::to_string(i) + " exceeds the current model's", i);
        }
        if (models_[i].dim() != models_.front().dim()) {
            throw ValidationError("ensemble base model dimension mismatch", i);
        }
    }
    double sum = 0.0;
    for (double w : weights_) sum += w;
    return sum;
}

double EnsembleSurrogate::predict(std::span<const double> x) const {
    if (x.size() != dim()) {
        throw ValidationError("predict_ensemble: expected dimension " + std::to_string(dim()) + ", got " +
                              std::to_string(x.size()));
    }
    if (models_.size() == 1) return models_.front().predict(x);
    double num = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < models_.size(); ++i) {
        const double h = models_[i].predict(x);
        num += weights_[i] * h;
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    // The weighted mean is a convex combination; clamping only absorbs rounding.
    return std::clamp(num / weight_sum_, lo, hi);
}

double predict_ensemble(const EnsembleSurrogate& e, std::span<const double> x) { return e.predict(x); }

std::uint64_t base_model_seed(std::uint64_t seed, std::size_t env_index, std::size_t model_env) {
    return derive_seed(seed, {0x656e73ULL, env_index, model_env});
}

EnsembleSurrogate update_ensemble(std::span<const DataChunk> history, const DataChunk& current,
                                  const RbfConfig& rbf, const EnsembleConfig& cfg, std::uint64_t seed,
                                  Execution exec) {
    if (cfg.max_history > 0 && history.size() > cfg.max_history) {
        history = history.subspan(history.size() - cfg.max_history);
    }
    const std::size_t t = history.size() + 1;
    const std::size_t env = current.env_index;
    const ChunkStats target = chunk_stats(current);

    std::vector<std::optional<RbfModel>> models(t);
    Vector rmses(t, 0.0);
    std::vector<std::exception_ptr> errors(t);

    auto train_one = [&](std::size_t i) {
        try {
            if (i + 1 == t) {
                Rng rng = make_rng(base_model_seed(seed, env, env));
                models[i].emplace(train_rbf(current.xs, current.ys, rbf, rng));
                rmses[i] = rmse(*models[i], current.xs, current.ys);
                return;
            }
            const DataChunk& past = history[i];
            const TransferredChunk moved = rescale_objectives(past, target);
            const SampleSet train = build_training_set(moved, current);
            Rng rng = make_rng(base_model_seed(seed, env, past.env_index));
            models[i].emplace(train_rbf(train, rbf, rng));
            rmses[i] = cfg.rmse_eval == RmseEval::current ? rmse(*models[i], current.xs, current.ys)
                                                          : rmse(*models[i], moved.xs, moved.ys_transferred);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };

    if (exec == Execution::parallel) {
        const long n = static_cast<long>(t);
#pragma omp parallel for schedule(dynamic) if (n > 1)
        for (long i = 0; i < n; ++i) train_one(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < t; ++i) train_one(i);
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<RbfModel> out;
    out.reserve(t);
    for (auto& m : models) out.push_back(std::move(*m));
    return EnsembleSurrogate(env, std::move(out), std::move(rmses));
}

}  // namespace driftopt
