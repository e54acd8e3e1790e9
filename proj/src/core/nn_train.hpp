#pragma once

#include "autoencoder.hpp"

namespace softshape {

struct TrainConfig {
    enum class Optimizer { Sgd, SgdMomentum, Adam };

    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Adam;
    std::uint64_t seed = 0;
    double val_fraction = 0.1;
    LossKind loss = LossKind::Mse;

    void validate() const;
};

TrainConfig::Optimizer parse_optimizer(const std::string& name);
std::string to_string(TrainConfig::Optimizer o);

/// Mean reconstruction loss over the rows of X (already normalized).
/// Per-sample MSE is averaged over features; per-sample Chamfer is the
/// symmetric squared nearest-neighbor sum over the N x 3 point sets.
double batch_loss(const Autoencoder& model, const Matrix& X, LossKind loss);

/// Running-statistic accumulator for the batch-norm layers of one batch.
struct BnAccumulator {
    struct LayerAcc {
        Vector sum, sumsq;
        double count = 0.0;
    };
    std::vector<LayerAcc> encoder, decoder;
};

/// Mean loss over the batch plus its exact gradient w.r.t. the flattened
/// trainable parameters (same order as Autoencoder::flat_parameters). The
/// Chamfer gradient holds nearest-neighbor correspondences fixed at the
/// evaluation point. Optionally accumulates batch-norm input statistics.
std::pair<double, Vector> loss_and_gradient(const Autoencoder& model, const Matrix& X,
                                            LossKind loss, BnAccumulator* bn = nullptr);

/// Minibatch gradient descent on normalized features. Deterministic for a
/// fixed seed (single-threaded). Aborts with a diagnostic on NaN loss.
TrainingLog train_autoencoder(Autoencoder& model, const Matrix& X_normalized,
                              const TrainConfig& config);

/// Dataset-level entry: resamples clouds to the model resolution when
/// needed, fits the min-max [0.1, 0.9] normalization, stores the record in
/// the model, and trains on the normalized features.
TrainingLog train_on_dataset(Autoencoder& model, const ShapeDataset& raw,
                             const TrainConfig& config);

}  // namespace softshape
