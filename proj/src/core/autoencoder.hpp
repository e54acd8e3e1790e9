#pragma once

#include "latent_model.hpp"
#include "nn_layers.hpp"

namespace softshape {

enum class LossKind { Mse, Chamfer };

LossKind parse_loss(const std::string& name);
std::string to_string(LossKind l);

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
};
using TrainingLog = std::vector<EpochStats>;

/// From-scratch MLP autoencoder: encoder h (input -> bottleneck k) and
/// decoder g (k -> input) with exact analytic decoder Jacobians.
///
/// encode/decode on the LatentModel surface work in raw feature space (the
/// stored normalization record is applied/inverted); the *_normalized
/// variants operate directly on network-space vectors.
class Autoencoder final : public LatentModel {
public:
    Autoencoder(std::vector<LayerSpec> encoder, std::vector<LayerSpec> decoder,
                std::uint64_t seed);

    // LatentModel
    int latent_dim() const override { return latent_dim_; }
    int ambient_dim() const override { return output_dim_; }
    Vector encode(const Vector& raw) const override;
    Vector decode(const Vector& z) const override { return decode_normalized(z); }
    Vector reconstruct(const Vector& z) const override { return norm_.invert(decode(z)); }
    Matrix decoder_jacobian(const Vector& z) const override;
    bool is_linear() const override { return false; }
    const FeatureSpace& feature_space() const override { return space_; }
    const NormalizationRecord& normalization() const override { return norm_; }
    std::string kind() const override { return "autoencoder"; }

    int input_dim() const { return input_dim_; }
    Vector encode_normalized(const Vector& x) const;
    Vector decode_normalized(const Vector& z) const;

    /// Per-point shared embedding followed by max pooling: the encoder chain
    /// up to and including its first max-pool layer, on a raw cloud.
    Vector pointnet_features(const PointCloud& cloud) const;

    // --- training/serialization surface ---
    const std::vector<LayerSpec>& encoder_spec() const { return encoder_spec_; }
    const std::vector<LayerSpec>& decoder_spec() const { return decoder_spec_; }
    std::vector<LayerParams>& encoder_params() { return encoder_params_; }
    std::vector<LayerParams>& decoder_params() { return decoder_params_; }
    const std::vector<LayerParams>& encoder_params() const { return encoder_params_; }
    const std::vector<LayerParams>& decoder_params() const { return decoder_params_; }

    /// Trainable parameters flattened in a fixed order (encoder then decoder;
    /// per layer W row-major, b, gamma, beta). Running statistics excluded.
    std::size_t parameter_count() const;
    Vector flat_parameters() const;
    void set_flat_parameters(const Vector& theta);

    Vector forward_encoder(const Vector& x, std::vector<LayerCache>* caches) const;
    Vector forward_decoder(const Vector& z, std::vector<LayerCache>* caches) const;

    void set_feature_space(FeatureSpace space) { space_ = std::move(space); }
    void set_normalization(NormalizationRecord rec) { norm_ = std::move(rec); }
    void set_loss(LossKind l) { loss_ = l; }
    LossKind loss() const { return loss_; }
    TrainingLog& training_log() { return log_; }
    const TrainingLog& training_log() const { return log_; }

private:
    std::vector<LayerSpec> encoder_spec_, decoder_spec_;
    std::vector<LayerParams> encoder_params_, decoder_params_;
    int input_dim_ = 0, latent_dim_ = 0, output_dim_ = 0;
    FeatureSpace space_;
    NormalizationRecord norm_ = NormalizationRecord::identity();
    LossKind loss_ = LossKind::Mse;
    TrainingLog log_;
};

/// Marker-data preset: 3q -> FC 8 -> FC k bottleneck, sigmoid decoder back to
/// 3q (k = 4 by default). all_smooth swaps the encoder ReLUs for tanh so the
/// whole map is smooth.
Autoencoder build_marker_preset(std::uint64_t seed, int q = 8, int latent = 4,
                                bool all_smooth = false);

/// Point-cloud preset: pointwise convs 8/32/64 + max pool (latent 64), FC
/// 256/512/3N sigmoid decoder.
Autoencoder build_cloud_preset(std::uint64_t seed, int resolution = 512);

/// Chain dimensions of a spec list starting from in_dim; throws on
/// incompatible sizes. Returns the output dimension.
int validate_chain(const std::vector<LayerSpec>& specs, int in_dim);

}  // namespace softshape
