#include "geodesic.hpp"

#include <cmath>

namespace softshape {

void GeodesicConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("GeodesicConfig: alpha must be > 0");
    if (!(tolerance > 0.0)) throw std::invalid_argument("GeodesicConfig: tolerance must be > 0");
    if (segments < 2) throw std::invalid_argument("GeodesicConfig: need at least 2 segments");
    if (max_iterations < 1) throw std::invalid_argument("GeodesicConfig: max iterations >= 1");
}

LatentCurve linear_interpolation(const Vector& z_start, const Vector& z_end, int segments) {
    if (z_start.size() != z_end.size())
        throw std::invalid_argument("linear_interpolation: endpoint dimension mismatch");
    if (segments < 1) throw std::invalid_argument("linear_interpolation: segments must be >= 1");
    LatentCurve curve;
    curve.nodes.resize(segments + 1, z_start.size());
    for (int i = 0; i <= segments; ++i) {
        const double t = static_cast<double>(i) / segments;
        curve.nodes.row(i) = ((1.0 - t) * z_start + t * z_end).transpose();
    }
    return curve;
}

Matrix metric_tensor(const Decoder& decoder, const Vector& z) {
    const Matrix J = decoder.decoder_jacobian(z);
    return J.transpose() * J;
}

double tangent_inner_product(const Decoder& decoder, const Vector& z, const Vector& u,
                             const Vector& v) {
    if (u.size() != decoder.latent_dim() || v.size() != decoder.latent_dim())
        throw std::invalid_argument("tangent_inner_product: dimension mismatch");
    return u.transpose() * metric_tensor(decoder, z) * v;
}

namespace {

std::vector<Vector> decode_nodes(const Decoder& decoder, const LatentCurve& curve) {
    std::vector<Vector> g(curve.nodes.rows());
    for (int i = 0; i < static_cast<int>(g.size()); ++i) g[i] = decoder.decode(curve.node(i));
    return g;
}

double energy_of(const std::vector<Vector>& g, double dt) {
    double e = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) e += (g[i + 1] - g[i]).squaredNorm();
    return 0.5 * e / dt;
}

Vector gradient_at(const Decoder& decoder, const Vector& z_i, const Vector& g_prev,
                   const Vector& g_i, const Vector& g_next, double dt) {
    const Vector second_diff = g_next - 2.0 * g_i + g_prev;
    return -(1.0 / dt) * (decoder.decoder_jacobian(z_i).transpose() * second_diff);
}

}  // namespace

double curve_energy(const Decoder& decoder, const LatentCurve& curve) {
    if (curve.segments() < 1) throw std::invalid_argument("curve_energy: need >= 1 segment");
    return energy_of(decode_nodes(decoder, curve), curve.dt());
}

Vector energy_gradient(const Decoder& decoder, const LatentCurve& curve, int i) {
    if (i < 1 || i > curve.segments() - 1)
        throw std::invalid_argument("energy_gradient: index " + std::to_string(i) +
                                    " is not an interior node (endpoints are fixed)");
    const Vector z = curve.node(i);
    return gradient_at(decoder, z, decoder.decode(curve.node(i - 1)), decoder.decode(z),
                       decoder.decode(curve.node(i + 1)), curve.dt());
}

double manifold_arc_length(const Decoder& decoder, const LatentCurve& curve) {
    if (curve.segments() < 1) throw std::invalid_argument("manifold_arc_length: empty curve");
    const auto g = decode_nodes(decoder, curve);
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) len += (g[i + 1] - g[i]).norm();
    return len;
}

std::pair<double, double> local_distortion(const Decoder& decoder, const Vector& z0,
                                           const Vector& d1, const Vector& d2) {
    if (d1.size() != z0.size() || d2.size() != z0.size())
        throw std::invalid_argument("local_distortion: dimension mismatch");
    if (d1.norm() > 1e-2 + 1e-15 || d2.norm() > 1e-2 + 1e-15)
        throw std::invalid_argument("local_distortion: shifts must have norm <= 1e-2");
    const double truth = (decoder.decode(z0 + d1) - decoder.decode(z0 + d2)).squaredNorm();
    const Vector delta = d1 - d2;
    const double approx = delta.transpose() * metric_tensor(decoder, z0) * delta;
    return {truth, approx};
}

std::pair<LatentCurve, GeodesicReport> geodesic_path(const Decoder& decoder,
                                                     const Vector& z_start, const Vector& z_end,
                                                     const GeodesicConfig& config) {
    config.validate();
    if (z_start.size() != decoder.latent_dim() || z_end.size() != decoder.latent_dim())
        throw std::invalid_argument("geodesic_path: endpoint dimension mismatch");

    const int N = config.segments;
    const double dt = 1.0 / N;
    LatentCurve curve = linear_interpolation(z_start, z_end, N);
    std::vector<Vector> g = decode_nodes(decoder, curve);

    GeodesicReport report;
    report.initial_energy = energy_of(g, dt);
    report.final_step_size = config.learning_rate;
    report.energy_log.push_back(report.initial_energy);

    double energy = report.initial_energy;
    double alpha = config.learning_rate;
    int stable = 0;
    int rejections = 0;

    for (int iter = 0; iter < config.max_iterations; ++iter) {
        double grad_sq = 0.0;
        for (int i = 1; i < N; ++i)
            grad_sq += gradient_at(decoder, curve.node(i), g[i - 1], g[i], g[i + 1], dt)
                           .squaredNorm();
        report.final_gradient_norm_sq = grad_sq;
        if (grad_sq <= config.tolerance) {
            report.converged = true;
            break;
        }

        LatentCurve candidate = curve;
        std::vector<Vector> g_cand = g;
        if (config.jacobi_updates) {
            for (int i = 1; i < N; ++i) {
                const Vector grad =
                    gradient_at(decoder, curve.node(i), g[i - 1], g[i], g[i + 1], dt);
                candidate.nodes.row(i) = curve.nodes.row(i) - alpha * grad.transpose();
            }
            for (int i = 1; i < N; ++i) g_cand[i] = decoder.decode(candidate.node(i));
        } else {
            // Gauss-Seidel sweep: each interior node sees already-updated
            // neighbors, matching the algorithm's inner loop.
            for (int i = 1; i < N; ++i) {
                const Vector grad = gradient_at(decoder, candidate.node(i), g_cand[i - 1],
                                                g_cand[i], g_cand[i + 1], dt);
                candidate.nodes.row(i) -= alpha * grad.transpose();
                g_cand[i] = decoder.decode(candidate.node(i));
            }
        }

        const double new_energy = energy_of(g_cand, dt);
        report.iterations = iter + 1;
        if (new_energy > energy) {
            // Reject the sweep and shrink the step.
            alpha *= 0.5;
            stable = 0;
            if (++rejections >= 10) {
                report.diverged = true;
                break;
            }
            continue;
        }
        rejections = 0;
        curve = std::move(candidate);
        g = std::move(g_cand);
        energy = new_energy;
        report.energy_log.push_back(energy);
        if (++stable >= 5 && alpha < config.learning_rate) {
            alpha = config.learning_rate;
            stable = 0;
        }
    }

    if (!report.converged) {
        double grad_sq = 0.0;
        for (int i = 1; i < N; ++i)
            grad_sq += gradient_at(decoder, curve.node(i), g[i - 1], g[i], g[i + 1], dt)
                           .squaredNorm();
        report.final_gradient_norm_sq = grad_sq;
        report.converged = grad_sq <= config.tolerance;
    }
    report.final_energy = energy;
    report.final_step_size = alpha;
    return {std::move(curve), report};
}

}  // namespace softshape
