#include "autoencoder.hpp"

namespace softshape {

LossKind parse_loss(const std::string& name) {
    if (name == "mse") return LossKind::Mse;
    if (name == "chamfer") return LossKind::Chamfer;
    throw std::invalid_argument("unknown loss: " + name);
}

std::string to_string(LossKind l) {
    return l == LossKind::Mse ? "mse" : "chamfer";
}

int validate_chain(const std::vector<LayerSpec>& specs, int in_dim) {
    if (specs.empty()) throw std::invalid_argument("layer chain must be nonempty");
    int dim = in_dim;
    for (const auto& s : specs) dim = s.output_dim(dim);
    return dim;
}

namespace {

// First layer determines the input width a chain accepts.
int chain_input_dim(const std::vector<LayerSpec>& specs) {
    if (specs.empty()) throw std::invalid_argument("layer chain must be nonempty");
    const LayerSpec& first = specs.front();
    switch (first.kind) {
        case LayerSpec::Kind::Affine: return first.in;
        case LayerSpec::Kind::Reshape: return first.rows * first.cols;
        case LayerSpec::Kind::BatchNorm:
            if (!first.per_channel) return first.dim;
            break;
        default: break;
    }
    throw std::invalid_argument(
        "layer chain must start with a layer of known input width (affine, reshape, "
        "or per-feature batch norm)");
}

}  // namespace

Autoencoder::Autoencoder(std::vector<LayerSpec> encoder, std::vector<LayerSpec> decoder,
                         std::uint64_t seed)
    : encoder_spec_(std::move(encoder)), decoder_spec_(std::move(decoder)) {
    // Cloud encoders start with a pointwise conv whose total input width is
    // only known from the decoder output (both ends live in feature space).
    const LayerSpec& first = encoder_spec_.front();
    if (first.kind == LayerSpec::Kind::PointwiseConv ||
        first.kind == LayerSpec::Kind::MaxPoolPoints ||
        (first.kind == LayerSpec::Kind::BatchNorm && first.per_channel) ||
        first.kind == LayerSpec::Kind::Activation) {
        latent_dim_ = chain_input_dim(decoder_spec_);
        output_dim_ = validate_chain(decoder_spec_, latent_dim_);
        input_dim_ = output_dim_;
        const int enc_out = validate_chain(encoder_spec_, input_dim_);
        if (enc_out != latent_dim_)
            throw std::invalid_argument("encoder output " + std::to_string(enc_out) +
                                        " != decoder input " + std::to_string(latent_dim_));
    } else {
        input_dim_ = chain_input_dim(encoder_spec_);
        latent_dim_ = validate_chain(encoder_spec_, input_dim_);
        output_dim_ = validate_chain(decoder_spec_, latent_dim_);
        if (output_dim_ != input_dim_)
            throw std::invalid_argument("decoder output " + std::to_string(output_dim_) +
                                        " != encoder input " + std::to_string(input_dim_));
    }

    std::mt19937_64 rng(seed);
    for (const auto& s : encoder_spec_) encoder_params_.push_back(init_layer(s, rng));
    for (const auto& s : decoder_spec_) decoder_params_.push_back(init_layer(s, rng));
}

Vector Autoencoder::forward_encoder(const Vector& x, std::vector<LayerCache>* caches) const {
    if (x.size() != input_dim_)
        throw std::invalid_argument("encode: expected input of length " +
                                    std::to_string(input_dim_) + ", got " +
                                    std::to_string(x.size()));
    Vector v = x;
    if (caches) caches->resize(encoder_spec_.size());
    for (std::size_t i = 0; i < encoder_spec_.size(); ++i)
        v = layer_forward(encoder_spec_[i], encoder_params_[i], v,
                          caches ? &(*caches)[i] : nullptr);
    return v;
}

Vector Autoencoder::forward_decoder(const Vector& z, std::vector<LayerCache>* caches) const {
    if (z.size() != latent_dim_)
        throw std::invalid_argument("decode: expected latent of length " +
                                    std::to_string(latent_dim_) + ", got " +
                                    std::to_string(z.size()));
    Vector v = z;
    if (caches) caches->resize(decoder_spec_.size());
    for (std::size_t i = 0; i < decoder_spec_.size(); ++i)
        v = layer_forward(decoder_spec_[i], decoder_params_[i], v,
                          caches ? &(*caches)[i] : nullptr);
    return v;
}

Vector Autoencoder::encode_normalized(const Vector& x) const {
    return forward_encoder(x, nullptr);
}

Vector Autoencoder::decode_normalized(const Vector& z) const {
    return forward_decoder(z, nullptr);
}

Vector Autoencoder::encode(const Vector& raw) const {
    return forward_encoder(norm_.apply(raw), nullptr);
}

Matrix Autoencoder::decoder_jacobian(const Vector& z) const {
    if (z.size() != latent_dim_)
        throw std::invalid_argument("decoder_jacobian: dimension mismatch");
    Vector v = z;
    Matrix J = Matrix::Identity(latent_dim_, latent_dim_);
    for (std::size_t i = 0; i < decoder_spec_.size(); ++i) {
        J = layer_jacobian(decoder_spec_[i], decoder_params_[i], v, J);
        v = layer_forward(decoder_spec_[i], decoder_params_[i], v, nullptr);
    }
    return J;
}

Vector Autoencoder::pointnet_features(const PointCloud& cloud) const {
    Vector v = norm_.apply(cloud.flatten());
    if (v.size() != input_dim_)
        throw std::invalid_argument("pointnet_features: cloud has " +
                                    std::to_string(cloud.size()) + " points, model expects " +
                                    std::to_string(input_dim_ / 3));
    bool pooled = false;
    for (std::size_t i = 0; i < encoder_spec_.size(); ++i) {
        v = layer_forward(encoder_spec_[i], encoder_params_[i], v, nullptr);
        if (encoder_spec_[i].kind == LayerSpec::Kind::MaxPoolPoints) {
            pooled = true;
            break;
        }
    }
    if (!pooled)
        throw std::invalid_argument("pointnet_features: encoder has no max-pool layer");
    return v;
}

std::size_t Autoencoder::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : encoder_params_) n += p.trainable_count();
    for (const auto& p : decoder_params_) n += p.trainable_count();
    return n;
}

Vector Autoencoder::flat_parameters() const {
    Vector theta(parameter_count());
    Eigen::Index at = 0;
    auto put = [&](const std::vector<LayerParams>& side) {
        for (const auto& p : side) {
            for (Eigen::Index r = 0; r < p.W.rows(); ++r)
                for (Eigen::Index c = 0; c < p.W.cols(); ++c) theta[at++] = p.W(r, c);
            for (Eigen::Index i = 0; i < p.b.size(); ++i) theta[at++] = p.b[i];
            for (Eigen::Index i = 0; i < p.gamma.size(); ++i) theta[at++] = p.gamma[i];
            for (Eigen::Index i = 0; i < p.beta.size(); ++i) theta[at++] = p.beta[i];
        }
    };
    put(encoder_params_);
    put(decoder_params_);
    return theta;
}

void Autoencoder::set_flat_parameters(const Vector& theta) {
    if (static_cast<std::size_t>(theta.size()) != parameter_count())
        throw std::invalid_argument("set_flat_parameters: expected " +
                                    std::to_string(parameter_count()) + " values");
    Eigen::Index at = 0;
    auto take = [&](std::vector<LayerParams>& side) {
        for (auto& p : side) {
            for (Eigen::Index r = 0; r < p.W.rows(); ++r)
                for (Eigen::Index c = 0; c < p.W.cols(); ++c) p.W(r, c) = theta[at++];
            for (Eigen::Index i = 0; i < p.b.size(); ++i) p.b[i] = theta[at++];
            for (Eigen::Index i = 0; i < p.gamma.size(); ++i) p.gamma[i] = theta[at++];
            for (Eigen::Index i = 0; i < p.beta.size(); ++i) p.beta[i] = theta[at++];
        }
    };
    take(encoder_params_);
    take(decoder_params_);
}

Autoencoder build_marker_preset(std::uint64_t seed, int q, int latent, bool all_smooth) {
    if (q < 2 || latent < 1) throw std::invalid_argument("marker preset: bad q or latent dim");
    const int n = 3 * q;
    const ActivationKind hidden = all_smooth ? ActivationKind::Tanh : ActivationKind::Relu;
    std::vector<LayerSpec> enc{
        LayerSpec::affine(n, 8),      LayerSpec::batch_norm(8),      LayerSpec::act(hidden),
        LayerSpec::affine(8, latent), LayerSpec::batch_norm(latent), LayerSpec::act(hidden),
    };
    std::vector<LayerSpec> dec{
        LayerSpec::affine(latent, 8),
        LayerSpec::batch_norm(8),
        LayerSpec::act(ActivationKind::Sigmoid),
        LayerSpec::affine(8, n),
        LayerSpec::act(ActivationKind::Sigmoid),
        LayerSpec::reshape(q, 3),
    };
    Autoencoder model(std::move(enc), std::move(dec), seed);
    model.set_feature_space(FeatureSpace::marker_raw(q));
    return model;
}

Autoencoder build_cloud_preset(std::uint64_t seed, int resolution) {
    if (resolution < 1) throw std::invalid_argument("cloud preset: bad resolution");
    const int n = 3 * resolution;
    std::vector<LayerSpec> enc{
        LayerSpec::pointwise_conv(3, 8),   LayerSpec::batch_norm(8, true),
        LayerSpec::act(ActivationKind::Relu),
        LayerSpec::pointwise_conv(8, 32),  LayerSpec::batch_norm(32, true),
        LayerSpec::act(ActivationKind::Relu),
        LayerSpec::pointwise_conv(32, 64), LayerSpec::batch_norm(64, true),
        LayerSpec::act(ActivationKind::Relu),
        LayerSpec::max_pool_points(64),
    };
    std::vector<LayerSpec> dec{
        LayerSpec::affine(64, 256),  LayerSpec::batch_norm(256),
        LayerSpec::act(ActivationKind::Sigmoid),
        LayerSpec::affine(256, 512), LayerSpec::batch_norm(512),
        LayerSpec::act(ActivationKind::Sigmoid),
        LayerSpec::affine(512, n),
        LayerSpec::act(ActivationKind::Sigmoid),
        LayerSpec::reshape(resolution, 3),
    };
    Autoencoder model(std::move(enc), std::move(dec), seed);
    model.set_feature_space(FeatureSpace::cloud_raw(resolution));
    model.set_loss(LossKind::Chamfer);
    return model;
}

}  // namespace softshape
