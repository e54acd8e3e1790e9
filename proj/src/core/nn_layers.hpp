#pragma once

#include <cstdint>
#include <random>

#include "types.hpp"

namespace softshape {

enum class ActivationKind { Sigmoid, Relu, Tanh, Identity };

ActivationKind parse_activation(const std::string& name);
std::string to_string(ActivationKind a);

/// One layer of an encoder or decoder chain. Point-cloud data flows through
/// the chain point-major (p0x, p0y, p0z, p1x, ...).
struct LayerSpec {
    enum class Kind { Affine, PointwiseConv, Activation, MaxPoolPoints, Reshape, BatchNorm };

    Kind kind = Kind::Affine;
    int in = 0, out = 0;         // Affine: vector sizes; PointwiseConv: channel counts
    ActivationKind activation = ActivationKind::Identity;
    int dim = 0;                 // BatchNorm: normalized width (channels if per_channel)
    bool per_channel = false;    // BatchNorm over channels of point-major data
    int channels = 0;            // MaxPoolPoints: channel count
    int rows = 0, cols = 0;      // Reshape: target shape (forward is identity)

    static LayerSpec affine(int in, int out);
    static LayerSpec pointwise_conv(int in_ch, int out_ch);
    static LayerSpec act(ActivationKind a);
    static LayerSpec max_pool_points(int channels);
    static LayerSpec reshape(int rows, int cols);
    static LayerSpec batch_norm(int dim, bool per_channel = false);

    /// Output length for the given input length; throws on incompatibility.
    int output_dim(int in_dim) const;
    bool has_weights() const { return kind == Kind::Affine || kind == Kind::PointwiseConv; }
    bool is_batch_norm() const { return kind == Kind::BatchNorm; }
};

/// Parameter tensors of one layer. BatchNorm keeps learnable scale/shift plus
/// running statistics; normalization always uses the running statistics, so
/// every forward pass is a per-sample deterministic map (the statistics are
/// refreshed from batch activations between optimizer steps).
struct LayerParams {
    Matrix W;
    Vector b;
    Vector gamma, beta;
    Vector run_mean, run_var;

    std::size_t trainable_count() const;
};

struct LayerGrads {
    Matrix W;
    Vector b;
    Vector gamma, beta;
};

/// Forward cache for one layer: the input it saw plus max-pool winners.
struct LayerCache {
    Vector input;
    std::vector<int> argmax;
};

constexpr double kBatchNormEps = 1e-5;

LayerParams init_layer(const LayerSpec& spec, std::mt19937_64& rng);
LayerGrads zero_grads(const LayerSpec& spec);

Vector layer_forward(const LayerSpec& spec, const LayerParams& params, const Vector& x,
                     LayerCache* cache);

/// Reverse-mode: returns dL/dx and accumulates parameter gradients.
Vector layer_backward(const LayerSpec& spec, const LayerParams& params, const LayerCache& cache,
                      const Vector& dy, LayerGrads& grads);

/// Forward-mode Jacobian push: given the layer input x and the Jacobian J of
/// x w.r.t. the latent code, returns the Jacobian of the layer output.
Matrix layer_jacobian(const LayerSpec& spec, const LayerParams& params, const Vector& x,
                      const Matrix& J);

double activate(ActivationKind a, double x);
double activate_derivative(ActivationKind a, double x);

}  // namespace softshape
