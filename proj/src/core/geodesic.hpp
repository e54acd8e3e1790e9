#pragma once

#include "latent_model.hpp"

namespace softshape {

/// Discretized latent curve z_0..z_N with fixed endpoints; dt = 1/N.
struct LatentCurve {
    Matrix nodes;  // (N+1) x k

    int segments() const { return static_cast<int>(nodes.rows()) - 1; }
    double dt() const { return 1.0 / segments(); }
    Vector node(int i) const { return nodes.row(i).transpose(); }
};

LatentCurve linear_interpolation(const Vector& z_start, const Vector& z_end, int segments);

struct GeodesicConfig {
    double learning_rate = 1e-2;
    double tolerance = 1e-6;   // on sum_i ||grad_i E||^2
    int max_iterations = 5000;
    int segments = 16;
    bool jacobi_updates = false;  // simultaneous interior updates instead of Gauss-Seidel

    void validate() const;
};

struct GeodesicReport {
    bool converged = false;
    bool diverged = false;  // energy kept increasing for 10 consecutive attempts
    int iterations = 0;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double final_gradient_norm_sq = 0.0;
    double final_step_size = 0.0;
    std::vector<double> energy_log;  // energy after each accepted iteration
};

/// Pullback metric G(z) = J_g(z)^T J_g(z); symmetric positive semidefinite.
Matrix metric_tensor(const Decoder& decoder, const Vector& z);

/// u^T G(z) v.
double tangent_inner_product(const Decoder& decoder, const Vector& z, const Vector& u,
                             const Vector& v);

/// Discrete curve energy (1/2) sum_{i=0}^{N-1} ||g(z_{i+1}) - g(z_i)||^2 / dt.
double curve_energy(const Decoder& decoder, const LatentCurve& curve);

/// Energy gradient at interior node i:
///   -(1/dt) J_g(z_i)^T (g(z_{i+1}) - 2 g(z_i) + g(z_{i-1})).
/// Endpoints are fixed; asking for them is an error.
Vector energy_gradient(const Decoder& decoder, const LatentCurve& curve, int i);

/// Discrete geodesic between fixed endpoints: linear initialization, then
/// gradient descent over the interior nodes until the squared gradient norm
/// falls below the tolerance. The step size halves whenever a sweep would
/// increase the energy (the sweep is rejected) and is restored after five
/// stable iterations; ten consecutive rejections flag divergence and the
/// best curve found is returned.
std::pair<LatentCurve, GeodesicReport> geodesic_path(const Decoder& decoder,
                                                     const Vector& z_start, const Vector& z_end,
                                                     const GeodesicConfig& config);

/// Discrete ambient arc length sum_i ||g(z_{i+1}) - g(z_i)||.
double manifold_arc_length(const Decoder& decoder, const LatentCurve& curve);

/// Diagnostic for latent-space anisotropy: the true squared ambient distance
/// ||g(z0+d1) - g(z0+d2)||^2 and its quadratic-form approximation
/// (d1-d2)^T J^T J (d1-d2). Shifts must be small (norm <= 1e-2).
std::pair<double, double> local_distortion(const Decoder& decoder, const Vector& z0,
                                           const Vector& d1, const Vector& d2);

}  // namespace softshape
