#include "nn_layers.hpp"

#include <cmath>

namespace softshape {

ActivationKind parse_activation(const std::string& name) {
    if (name == "sigmoid") return ActivationKind::Sigmoid;
    if (name == "relu") return ActivationKind::Relu;
    if (name == "tanh") return ActivationKind::Tanh;
    if (name == "identity") return ActivationKind::Identity;
    throw std::invalid_argument("unknown activation: " + name);
}

std::string to_string(ActivationKind a) {
    switch (a) {
        case ActivationKind::Sigmoid: return "sigmoid";
        case ActivationKind::Relu: return "relu";
        case ActivationKind::Tanh: return "tanh";
        case ActivationKind::Identity: return "identity";
    }
    throw std::logic_error("bad activation");
}

double activate(ActivationKind a, double x) {
    switch (a) {
        case ActivationKind::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case ActivationKind::Relu: return x > 0.0 ? x : 0.0;
        case ActivationKind::Tanh: return std::tanh(x);
        case ActivationKind::Identity: return x;
    }
    throw std::logic_error("bad activation");
}

double activate_derivative(ActivationKind a, double x) {
    switch (a) {
        case ActivationKind::Sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-x));
            return s * (1.0 - s);
        }
        case ActivationKind::Relu: return x > 0.0 ? 1.0 : 0.0;  // subgradient 0 at 0
        case ActivationKind::Tanh: {
            const double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case ActivationKind::Identity: return 1.0;
    }
    throw std::logic_error("bad activation");
}

LayerSpec LayerSpec::affine(int in, int out) {
    LayerSpec s;
    s.kind = Kind::Affine;
    s.in = in;
    s.out = out;
    return s;
}

LayerSpec LayerSpec::pointwise_conv(int in_ch, int out_ch) {
    LayerSpec s;
    s.kind = Kind::PointwiseConv;
    s.in = in_ch;
    s.out = out_ch;
    return s;
}

LayerSpec LayerSpec::act(ActivationKind a) {
    LayerSpec s;
    s.kind = Kind::Activation;
    s.activation = a;
    return s;
}

LayerSpec LayerSpec::max_pool_points(int channels) {
    LayerSpec s;
    s.kind = Kind::MaxPoolPoints;
    s.channels = channels;
    return s;
}

LayerSpec LayerSpec::reshape(int rows, int cols) {
    LayerSpec s;
    s.kind = Kind::Reshape;
    s.rows = rows;
    s.cols = cols;
    return s;
}

LayerSpec LayerSpec::batch_norm(int dim, bool per_channel) {
    LayerSpec s;
    s.kind = Kind::BatchNorm;
    s.dim = dim;
    s.per_channel = per_channel;
    return s;
}

int LayerSpec::output_dim(int in_dim) const {
    switch (kind) {
        case Kind::Affine:
            if (in_dim != in)
                throw std::invalid_argument("affine layer: expected input " + std::to_string(in) +
                                            ", got " + std::to_string(in_dim));
            return out;
        case Kind::PointwiseConv:
            if (in <= 0 || in_dim % in != 0)
                throw std::invalid_argument("pointwise conv: input length not divisible by " +
                                            std::to_string(in) + " channels");
            return in_dim / in * out;
        case Kind::Activation:
            return in_dim;
        case Kind::MaxPoolPoints:
            if (channels <= 0 || in_dim % channels != 0)
                throw std::invalid_argument("max pool: input length not divisible by channels");
            return channels;
        case Kind::Reshape:
            if (in_dim != rows * cols)
                throw std::invalid_argument("reshape: input length " + std::to_string(in_dim) +
                                            " != " + std::to_string(rows * cols));
            return in_dim;
        case Kind::BatchNorm:
            if (per_channel) {
                if (dim <= 0 || in_dim % dim != 0)
                    throw std::invalid_argument("batch norm: input not divisible by channels");
            } else if (in_dim != dim) {
                throw std::invalid_argument("batch norm: expected width " + std::to_string(dim));
            }
            return in_dim;
    }
    throw std::logic_error("bad layer kind");
}

std::size_t LayerParams::trainable_count() const {
    return static_cast<std::size_t>(W.size()) + b.size() + gamma.size() + beta.size();
}

LayerParams init_layer(const LayerSpec& spec, std::mt19937_64& rng) {
    LayerParams p;
    if (spec.has_weights()) {
        const double limit = std::sqrt(6.0 / (spec.in + spec.out));
        std::uniform_real_distribution<double> uni(-limit, limit);
        p.W.resize(spec.out, spec.in);
        for (Eigen::Index r = 0; r < p.W.rows(); ++r)
            for (Eigen::Index c = 0; c < p.W.cols(); ++c) p.W(r, c) = uni(rng);
        p.b = Vector::Zero(spec.out);
    } else if (spec.is_batch_norm()) {
        p.gamma = Vector::Ones(spec.dim);
        p.beta = Vector::Zero(spec.dim);
        p.run_mean = Vector::Zero(spec.dim);
        p.run_var = Vector::Ones(spec.dim);
    }
    return p;
}

LayerGrads zero_grads(const LayerSpec& spec) {
    LayerGrads g;
    if (spec.has_weights()) {
        g.W = Matrix::Zero(spec.out, spec.in);
        g.b = Vector::Zero(spec.out);
    } else if (spec.is_batch_norm()) {
        g.gamma = Vector::Zero(spec.dim);
        g.beta = Vector::Zero(spec.dim);
    }
    return g;
}

Vector layer_forward(const LayerSpec& spec, const LayerParams& params, const Vector& x,
                     LayerCache* cache) {
    const int out_dim = spec.output_dim(static_cast<int>(x.size()));
    if (cache) cache->input = x;
    switch (spec.kind) {
        case LayerSpec::Kind::Affine:
            return params.W * x + params.b;
        case LayerSpec::Kind::PointwiseConv: {
            const int n_pts = static_cast<int>(x.size()) / spec.in;
            Vector y(out_dim);
            for (int p = 0; p < n_pts; ++p)
                y.segment(p * spec.out, spec.out) =
                    params.W * x.segment(p * spec.in, spec.in) + params.b;
            return y;
        }
        case LayerSpec::Kind::Activation: {
            Vector y(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = activate(spec.activation, x[i]);
            return y;
        }
        case LayerSpec::Kind::MaxPoolPoints: {
            const int C = spec.channels;
            const int n_pts = static_cast<int>(x.size()) / C;
            Vector y(C);
            std::vector<int> arg(C, 0);
            for (int c = 0; c < C; ++c) {
                double best = x[c];
                for (int p = 1; p < n_pts; ++p) {
                    const double v = x[p * C + c];
                    if (v > best) {
                        best = v;
                        arg[c] = p;
                    }
                }
                y[c] = best;
            }
            if (cache) cache->argmax = std::move(arg);
            return y;
        }
        case LayerSpec::Kind::Reshape:
            return x;
        case LayerSpec::Kind::BatchNorm: {
            const int C = spec.dim;
            Vector y(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const int c = spec.per_channel ? static_cast<int>(i % C) : static_cast<int>(i);
                y[i] = params.gamma[c] * (x[i] - params.run_mean[c]) /
                           std::sqrt(params.run_var[c] + kBatchNormEps) +
                       params.beta[c];
            }
            return y;
        }
    }
    throw std::logic_error("bad layer kind");
}

Vector layer_backward(const LayerSpec& spec, const LayerParams& params, const LayerCache& cache,
                      const Vector& dy, LayerGrads& grads) {
    const Vector& x = cache.input;
    switch (spec.kind) {
        case LayerSpec::Kind::Affine:
            grads.W.noalias() += dy * x.transpose();
            grads.b += dy;
            return params.W.transpose() * dy;
        case LayerSpec::Kind::PointwiseConv: {
            const int n_pts = static_cast<int>(x.size()) / spec.in;
            Vector dx(x.size());
            for (int p = 0; p < n_pts; ++p) {
                const auto dyp = dy.segment(p * spec.out, spec.out);
                const auto xp = x.segment(p * spec.in, spec.in);
                grads.W.noalias() += dyp * xp.transpose();
                grads.b += dyp;
                dx.segment(p * spec.in, spec.in) = params.W.transpose() * dyp;
            }
            return dx;
        }
        case LayerSpec::Kind::Activation: {
            Vector dx(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i)
                dx[i] = dy[i] * activate_derivative(spec.activation, x[i]);
            return dx;
        }
        case LayerSpec::Kind::MaxPoolPoints: {
            const int C = spec.channels;
            Vector dx = Vector::Zero(x.size());
            for (int c = 0; c < C; ++c) dx[cache.argmax[c] * C + c] = dy[c];
            return dx;
        }
        case LayerSpec::Kind::Reshape:
            return dy;
        case LayerSpec::Kind::BatchNorm: {
            const int C = spec.dim;
            Vector dx(x.size());
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const int c = spec.per_channel ? static_cast<int>(i % C) : static_cast<int>(i);
                const double inv_sd = 1.0 / std::sqrt(params.run_var[c] + kBatchNormEps);
                const double xhat = (x[i] - params.run_mean[c]) * inv_sd;
                grads.gamma[c] += dy[i] * xhat;
                grads.beta[c] += dy[i];
                dx[i] = dy[i] * params.gamma[c] * inv_sd;
            }
            return dx;
        }
    }
    throw std::logic_error("bad layer kind");
}

Matrix layer_jacobian(const LayerSpec& spec, const LayerParams& params, const Vector& x,
                      const Matrix& J) {
    switch (spec.kind) {
        case LayerSpec::Kind::Affine:
            return params.W * J;
        case LayerSpec::Kind::PointwiseConv: {
            const int n_pts = static_cast<int>(x.size()) / spec.in;
            Matrix out(static_cast<Eigen::Index>(n_pts) * spec.out, J.cols());
            for (int p = 0; p < n_pts; ++p)
                out.middleRows(p * spec.out, spec.out).noalias() =
                    params.W * J.middleRows(p * spec.in, spec.in);
            return out;
        }
        case LayerSpec::Kind::Activation: {
            Matrix out = J;
            for (Eigen::Index i = 0; i < x.size(); ++i)
                out.row(i) *= activate_derivative(spec.activation, x[i]);
            return out;
        }
        case LayerSpec::Kind::MaxPoolPoints: {
            const int C = spec.channels;
            const int n_pts = static_cast<int>(x.size()) / C;
            Matrix out(C, J.cols());
            for (int c = 0; c < C; ++c) {
                int arg = 0;
                double best = x[c];
                for (int p = 1; p < n_pts; ++p)
                    if (x[p * C + c] > best) {
                        best = x[p * C + c];
                        arg = p;
                    }
                out.row(c) = J.row(arg * C + c);
            }
            return out;
        }
        case LayerSpec::Kind::Reshape:
            return J;
        case LayerSpec::Kind::BatchNorm: {
            const int C = spec.dim;
            Matrix out = J;
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                const int c = spec.per_channel ? static_cast<int>(i % C) : static_cast<int>(i);
                out.row(i) *= params.gamma[c] / std::sqrt(params.run_var[c] + kBatchNormEps);
            }
            return out;
        }
    }
    throw std::logic_error("bad layer kind");
}

}  // namespace softshape
