#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "driftopt/core_data.hpp"
#include "driftopt/parallel.hpp"
#include "driftopt/rbf.hpp"

namespace driftopt {

inline constexpr double kWeightEpsilon = 1e-12;

/// Which data each base model's RMSE is measured on.
///  - current: every model on the current chunk D_t.
///  - transferred: historical models on their own transferred chunk, the
///    current model on D_t.
enum class RmseEval { current, transferred };

struct EnsembleConfig {
    RmseEval rmse_eval = RmseEval::current;
    /// Keep only the most recent `max_history` historical chunks; 0 = unbounded.
    std::size_t max_history = 0;
};

/// w_i = 1 / (RMSE_i + RMSE_t + eps) for i < t, w_t = 1 / (RMSE_t + eps).
/// The last entry of `rmses` is RMSE_t.
Vector ensemble_weights(std::span<const double> rmses);

/// Weighted combination of base RBF models; the last model is the one trained
/// on the current environment alone. Immutable once built.
class EnsembleSurrogate {
public:
    EnsembleSurrogate(std::size_t env_index, std::vector<RbfModel> models, Vector rmses);
    /// Explicit weights; must be positive, finite, and dominated by the last.
    EnsembleSurrogate(std::size_t env_index, std::vector<RbfModel> models, Vector rmses, Vector weights);

    double predict(std::span<const double> x) const;
    double operator()(std::span<const double> x) const { return predict(x); }

    std::size_t env_index() const { return env_index_; }
    std::size_t size() const { return models_.size(); }
    std::size_t dim() const { return models_.front().dim(); }
    const std::vector<RbfModel>& base_models() const { return models_; }
    const Vector& rmses() const { return rmses_; }
    const Vector& weights() const { return weights_; }

private:
    double checked_weight_sum() const;

    std::size_t env_index_;
    std::vector<RbfModel> models_;
    Vector rmses_;
    Vector weights_;
    double weight_sum_ = 0.0;
};

double predict_ensemble(const EnsembleSurrogate& e, std::span<const double> x);

/// Substream seed of one base model: (seed, current env, model env).
std::uint64_t base_model_seed(std::uint64_t seed, std::size_t env_index, std::size_t model_env);

/// Trains h_t on `current` and one h_i per historical chunk on the transferred
/// history joined with `current`, then weights them by RMSE. The returned
/// models are ordered oldest history first, h_t last.
EnsembleSurrogate update_ensemble(std::span<const DataChunk> history, const DataChunk& current,
                                  const RbfConfig& rbf, const EnsembleConfig& cfg, std::uint64_t seed,
                                  Execution exec = Execution::serial);

}  // namespace driftopt
