#include "nn_train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sampling.hpp"

namespace softshape {

namespace {

constexpr double kBnMomentum = 0.1;

std::vector<Vec3> row_to_points(const Vector& row) {
    std::vector<Vec3> pts(row.size() / 3);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = row.segment<3>(3 * i);
    return pts;
}

// Per-sample loss and its gradient w.r.t. the decoded output.
double sample_loss(LossKind loss, const Vector& decoded, const Vector& target, Vector* dout) {
    if (loss == LossKind::Mse) {
        const Vector diff = decoded - target;
        if (dout) *dout = 2.0 * diff / static_cast<double>(diff.size());
        return diff.squaredNorm() / static_cast<double>(diff.size());
    }
    // Chamfer (Eq.-style symmetric sum of squared nearest-neighbor
    // distances); correspondences held fixed for the gradient.
    const std::vector<Vec3> xs = row_to_points(target);
    const std::vector<Vec3> ys = row_to_points(decoded);
    const std::vector<int> nn_xy = nearest_neighbor_indices(xs, ys);
    const std::vector<int> nn_yx = nearest_neighbor_indices(ys, xs);
    double value = 0.0;
    std::vector<Vec3> grad(ys.size(), Vec3::Zero());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const Vec3 d = ys[nn_xy[i]] - xs[i];
        value += d.squaredNorm();
        grad[nn_xy[i]] += 2.0 * d;
    }
    for (std::size_t j = 0; j < ys.size(); ++j) {
        const Vec3 d = ys[j] - xs[nn_yx[j]];
        value += d.squaredNorm();
        grad[j] += 2.0 * d;
    }
    if (dout) {
        dout->resize(decoded.size());
        for (std::size_t j = 0; j < ys.size(); ++j) dout->segment<3>(3 * j) = grad[j];
    }
    return value;
}

void accumulate_bn(const std::vector<LayerSpec>& specs, const std::vector<LayerCache>& caches,
                   std::vector<BnAccumulator::LayerAcc>& accs) {
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!specs[i].is_batch_norm()) continue;
        const Vector& x = caches[i].input;
        auto& acc = accs[i];
        const int C = specs[i].dim;
        if (acc.sum.size() == 0) {
            acc.sum = Vector::Zero(C);
            acc.sumsq = Vector::Zero(C);
        }
        if (specs[i].per_channel) {
            const int n_pts = static_cast<int>(x.size()) / C;
            for (int p = 0; p < n_pts; ++p)
                for (int c = 0; c < C; ++c) {
                    const double v = x[p * C + c];
                    acc.sum[c] += v;
                    acc.sumsq[c] += v * v;
                }
            acc.count += n_pts;
        } else {
            acc.sum += x;
            acc.sumsq += x.cwiseProduct(x);
            acc.count += 1.0;
        }
    }
}

void apply_bn_update(const std::vector<LayerSpec>& specs, std::vector<LayerParams>& params,
                     const std::vector<BnAccumulator::LayerAcc>& accs) {
    for (std::size_t i = 0; i < specs.size(); ++i) {
        if (!specs[i].is_batch_norm() || accs[i].count <= 0.0) continue;
        const Vector mean = accs[i].sum / accs[i].count;
        const Vector var = (accs[i].sumsq / accs[i].count - mean.cwiseProduct(mean)).cwiseMax(0.0);
        params[i].run_mean = (1.0 - kBnMomentum) * params[i].run_mean + kBnMomentum * mean;
        params[i].run_var = (1.0 - kBnMomentum) * params[i].run_var + kBnMomentum * var;
    }
}

struct OptimizerState {
    Vector m, v, momentum;
    long t = 0;
};

void optimizer_step(TrainConfig::Optimizer opt, OptimizerState& st, Vector& theta,
                    const Vector& grad, double lr) {
    switch (opt) {
        case TrainConfig::Optimizer::Sgd:
            theta -= lr * grad;
            return;
        case TrainConfig::Optimizer::SgdMomentum:
            if (st.momentum.size() == 0) st.momentum = Vector::Zero(theta.size());
            st.momentum = 0.9 * st.momentum + grad;
            theta -= lr * st.momentum;
            return;
        case TrainConfig::Optimizer::Adam: {
            if (st.m.size() == 0) {
                st.m = Vector::Zero(theta.size());
                st.v = Vector::Zero(theta.size());
            }
            ++st.t;
            st.m = 0.9 * st.m + 0.1 * grad;
            st.v = 0.999 * st.v + 0.001 * grad.cwiseProduct(grad);
            const double bc1 = 1.0 - std::pow(0.9, st.t);
            const double bc2 = 1.0 - std::pow(0.999, st.t);
            const Vector denom = ((st.v / bc2).cwiseSqrt().array() + 1e-8).matrix();
            theta -= (lr / bc1) * st.m.cwiseQuotient(denom);
            return;
        }
    }
    throw std::logic_error("bad optimizer");
}

Vector flatten_grads(const Autoencoder& model, const std::vector<LayerGrads>& enc,
                     const std::vector<LayerGrads>& dec) {
    Vector g(model.parameter_count());
    Eigen::Index at = 0;
    auto put = [&](const std::vector<LayerGrads>& side) {
        for (const auto& l : side) {
            for (Eigen::Index r = 0; r < l.W.rows(); ++r)
                for (Eigen::Index c = 0; c < l.W.cols(); ++c) g[at++] = l.W(r, c);
            for (Eigen::Index i = 0; i < l.b.size(); ++i) g[at++] = l.b[i];
            for (Eigen::Index i = 0; i < l.gamma.size(); ++i) g[at++] = l.gamma[i];
            for (Eigen::Index i = 0; i < l.beta.size(); ++i) g[at++] = l.beta[i];
        }
    };
    put(enc);
    put(dec);
    return g;
}

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 0) throw std::invalid_argument("TrainConfig: epochs must be >= 0");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch size must be >= 1");
    if (learning_rate < 0.0)
        throw std::invalid_argument("TrainConfig: learning rate must be >= 0");
    if (!(val_fraction >= 0.0 && val_fraction < 1.0))
        throw std::invalid_argument("TrainConfig: validation fraction must be in [0,1)");
}

TrainConfig::Optimizer parse_optimizer(const std::string& name) {
    if (name == "sgd") return TrainConfig::Optimizer::Sgd;
    if (name == "sgd-momentum") return TrainConfig::Optimizer::SgdMomentum;
    if (name == "adam") return TrainConfig::Optimizer::Adam;
    throw std::invalid_argument("unknown optimizer: " + name);
}

std::string to_string(TrainConfig::Optimizer o) {
    switch (o) {
        case TrainConfig::Optimizer::Sgd: return "sgd";
        case TrainConfig::Optimizer::SgdMomentum: return "sgd-momentum";
        case TrainConfig::Optimizer::Adam: return "adam";
    }
    throw std::logic_error("bad optimizer");
}

double batch_loss(const Autoencoder& model, const Matrix& X, LossKind loss) {
    if (X.rows() == 0) throw std::invalid_argument("batch_loss: empty batch");
    double total = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Vector x = X.row(i).transpose();
        const Vector decoded = model.decode_normalized(model.encode_normalized(x));
        total += sample_loss(loss, decoded, x, nullptr);
    }
    return total / static_cast<double>(X.rows());
}

std::pair<double, Vector> loss_and_gradient(const Autoencoder& model, const Matrix& X,
                                            LossKind loss, BnAccumulator* bn) {
    if (X.rows() == 0) throw std::invalid_argument("loss_and_gradient: empty batch");
    std::vector<LayerGrads> enc_grads, dec_grads;
    for (const auto& s : model.encoder_spec()) enc_grads.push_back(zero_grads(s));
    for (const auto& s : model.decoder_spec()) dec_grads.push_back(zero_grads(s));
    if (bn) {
        bn->encoder.resize(model.encoder_spec().size());
        bn->decoder.resize(model.decoder_spec().size());
    }

    double total = 0.0;
    std::vector<LayerCache> enc_cache, dec_cache;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Vector x = X.row(i).transpose();
        const Vector z = model.forward_encoder(x, &enc_cache);
        const Vector decoded = model.forward_decoder(z, &dec_cache);
        Vector dout;
        total += sample_loss(loss, decoded, x, &dout);

        Vector delta = dout;
        for (int l = static_cast<int>(model.decoder_spec().size()) - 1; l >= 0; --l)
            delta = layer_backward(model.decoder_spec()[l], model.decoder_params()[l],
                                   dec_cache[l], delta, dec_grads[l]);
        for (int l = static_cast<int>(model.encoder_spec().size()) - 1; l >= 0; --l)
            delta = layer_backward(model.encoder_spec()[l], model.encoder_params()[l],
                                   enc_cache[l], delta, enc_grads[l]);

        if (bn) {
            accumulate_bn(model.encoder_spec(), enc_cache, bn->encoder);
            accumulate_bn(model.decoder_spec(), dec_cache, bn->decoder);
        }
    }

    const double inv = 1.0 / static_cast<double>(X.rows());
    for (auto& g : enc_grads) {
        g.W *= inv;
        g.b *= inv;
        g.gamma *= inv;
        g.beta *= inv;
    }
    for (auto& g : dec_grads) {
        g.W *= inv;
        g.b *= inv;
        g.gamma *= inv;
        g.beta *= inv;
    }
    return {total * inv, flatten_grads(model, enc_grads, dec_grads)};
}

TrainingLog train_autoencoder(Autoencoder& model, const Matrix& X, const TrainConfig& config) {
    config.validate();
    if (X.rows() < 1) throw std::invalid_argument("train: empty dataset");
    if (X.cols() != model.input_dim())
        throw std::invalid_argument("train: feature width " + std::to_string(X.cols()) +
                                    " != model input " + std::to_string(model.input_dim()));
    if (config.loss == LossKind::Chamfer &&
        model.feature_space().kind != FeatureSpace::Kind::CloudRaw)
        throw std::invalid_argument("train: chamfer loss applies only to point-cloud models");
    // Sigmoid output layers can only reach (0,1); reject unnormalized data.
    const auto& dec = model.decoder_spec();
    for (auto it = dec.rbegin(); it != dec.rend(); ++it) {
        if (it->kind == LayerSpec::Kind::Reshape) continue;
        if (it->kind == LayerSpec::Kind::Activation &&
            it->activation == ActivationKind::Sigmoid &&
            (X.minCoeff() < 0.0 || X.maxCoeff() > 1.0))
            throw std::invalid_argument("train: features outside [0,1] but the decoder output "
                                        "is sigmoid; normalize the dataset first");
        break;
    }

    std::mt19937_64 rng(config.seed);
    std::vector<Eigen::Index> idx(X.rows());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);

    const Eigen::Index n_val = static_cast<Eigen::Index>(
        std::floor(config.val_fraction * static_cast<double>(X.rows())));
    const Eigen::Index n_train = X.rows() - n_val;
    if (n_train < 1) throw std::invalid_argument("train: no training samples after split");
    std::vector<Eigen::Index> train_idx(idx.begin(), idx.begin() + n_train);
    std::vector<Eigen::Index> val_idx(idx.begin() + n_train, idx.end());

    Matrix val(n_val, X.cols());
    for (Eigen::Index i = 0; i < n_val; ++i) val.row(i) = X.row(val_idx[i]);

    OptimizerState opt_state;
    TrainingLog log;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(train_idx.begin(), train_idx.end(), rng);
        double epoch_loss = 0.0;
        for (Eigen::Index start = 0; start < n_train; start += config.batch_size) {
            const Eigen::Index count = std::min<Eigen::Index>(config.batch_size, n_train - start);
            Matrix batch(count, X.cols());
            for (Eigen::Index i = 0; i < count; ++i) batch.row(i) = X.row(train_idx[start + i]);

            BnAccumulator bn;
            auto [loss, grad] = loss_and_gradient(model, batch, config.loss, &bn);
            if (!std::isfinite(loss))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", batch offset " +
                                         std::to_string(start));
            epoch_loss += loss * static_cast<double>(count);

            // A zero learning rate is a complete no-op: neither the weights
            // nor the batch-norm running statistics move.
            if (config.learning_rate > 0.0) {
                Vector theta = model.flat_parameters();
                optimizer_step(config.optimizer, opt_state, theta, grad, config.learning_rate);
                model.set_flat_parameters(theta);
                apply_bn_update(model.encoder_spec(), model.encoder_params(), bn.encoder);
                apply_bn_update(model.decoder_spec(), model.decoder_params(), bn.decoder);
            }
        }
        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_loss / static_cast<double>(n_train);
        stats.val_loss = n_val > 0 ? batch_loss(model, val, config.loss) : 0.0;
        log.push_back(stats);
    }
    auto& stored = model.training_log();
    stored.insert(stored.end(), log.begin(), log.end());
    return log;
}

TrainingLog train_on_dataset(Autoencoder& model, const ShapeDataset& raw,
                             const TrainConfig& config) {
    if (raw.empty()) throw std::invalid_argument("train: empty dataset");
    if (model.feature_space().kind == FeatureSpace::Kind::CloudRaw) {
        if (raw.kind != DatasetKind::Cloud)
            throw std::invalid_argument("train: cloud model requires a cloud dataset");
        const int resolution = model.feature_space().resolution;
        ShapeDataset resampled = raw;
        for (auto& c : resampled.clouds)
            if (c.size() != resolution) c = farthest_point_sample(c, resolution);
        auto [normed, rec] = normalize_dataset(resampled, NormalizationMode::MinMax);
        model.set_normalization(tile_channel_record(rec, resolution));
        return train_autoencoder(model, normed.feature_matrix(), config);
    }
    if (raw.kind != DatasetKind::Markers)
        throw std::invalid_argument("train: marker model requires a marker dataset");
    auto [normed, rec] = normalize_dataset(raw, NormalizationMode::MinMax);
    model.set_normalization(rec);
    return train_autoencoder(model, normed.feature_matrix(), config);
}

}  // namespace softshape
