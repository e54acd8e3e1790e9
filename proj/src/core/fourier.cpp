#include "fourier.hpp"

#include <cmath>

#include "metrics.hpp"

namespace softshape {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Closed contour vertices v_0..v_M with v_M == v_0 implied by construction.
std::vector<Vec3> closed_contour(const MarkerShape& shape, ContourClosure closure) {
    const auto& m = shape.points;
    std::vector<Vec3> v(m.begin(), m.end());
    if (closure == ContourClosure::Mirror) {
        for (int i = static_cast<int>(m.size()) - 2; i >= 1; --i) v.push_back(m[i]);
    }
    v.push_back(m.front());
    return v;
}

}  // namespace

Vector FourierDescriptor::flatten() const {
    Vector flat(3 + 6 * n_harmonics);
    flat[0] = bias.x();
    flat[1] = bias.y();
    flat[2] = bias.z();
    for (int n = 0; n < n_harmonics; ++n)
        for (int c = 0; c < 6; ++c) flat[3 + 6 * n + c] = coefficients(n, c);
    return flat;
}

FourierDescriptor FourierDescriptor::from_flat(const Vector& flat, double period) {
    if (flat.size() < 3 || (flat.size() - 3) % 6 != 0)
        throw std::invalid_argument("FourierDescriptor::from_flat: length must be 3 + 6N");
    FourierDescriptor d;
    d.n_harmonics = static_cast<int>((flat.size() - 3) / 6);
    d.bias = Vec3(flat[0], flat[1], flat[2]);
    d.coefficients.resize(d.n_harmonics, 6);
    for (int n = 0; n < d.n_harmonics; ++n)
        for (int c = 0; c < 6; ++c) d.coefficients(n, c) = flat[3 + 6 * n + c];
    d.period = period;
    return d;
}

FourierDescriptor fit_fourier(const MarkerShape& shape, int n_harmonics,
                              ContourClosure closure) {
    const int q = shape.marker_count();
    if (q < 3) throw std::invalid_argument("fit_fourier: need at least 3 markers");
    if (n_harmonics < 1) throw std::invalid_argument("fit_fourier: need at least 1 harmonic");

    const std::vector<Vec3> v = closed_contour(shape, closure);
    const int M = static_cast<int>(v.size()) - 1;  // segment count

    std::vector<double> t(M + 1, 0.0);
    for (int j = 1; j <= M; ++j) {
        const double dt = (v[j] - v[j - 1]).norm();
        if (dt == 0.0)
            throw std::invalid_argument("fit_fourier: coincident consecutive markers (segment " +
                                        std::to_string(j) + ")");
        t[j] = t[j - 1] + dt;
    }
    const double L = t[M];

    FourierDescriptor desc;
    desc.n_harmonics = n_harmonics;
    desc.period = L;
    desc.closure = closure;
    desc.coefficients = Matrix::Zero(n_harmonics, 6);
    desc.over_parameterized = 3 + 6 * n_harmonics > 3 * q;

    // Bias: parameterized mean of the piecewise-linear contour.
    Vec3 bias = Vec3::Zero();
    for (int j = 1; j <= M; ++j) bias += (t[j] - t[j - 1]) * 0.5 * (v[j - 1] + v[j]);
    desc.bias = bias / L;

    // Piecewise-linear closed contour: the coordinate derivative is constant
    // per segment, so the Fourier integrals collapse to the classic
    // closed-form sums over segments.
    const double w = 2.0 * kPi / L;
    for (int n = 1; n <= n_harmonics; ++n) {
        const double scale = L / (2.0 * kPi * kPi * n * n);
        Eigen::Matrix<double, 6, 1> acc = Eigen::Matrix<double, 6, 1>::Zero();
        for (int j = 1; j <= M; ++j) {
            const double dt = t[j] - t[j - 1];
            const Vec3 slope = (v[j] - v[j - 1]) / dt;
            const double c1 = std::cos(w * n * t[j]) - std::cos(w * n * t[j - 1]);
            const double s1 = std::sin(w * n * t[j]) - std::sin(w * n * t[j - 1]);
            for (int axis = 0; axis < 3; ++axis) {
                acc[2 * axis] += slope[axis] * c1;
                acc[2 * axis + 1] += slope[axis] * s1;
            }
        }
        desc.coefficients.row(n - 1) = (scale * acc).transpose();
    }

    desc.marker_params.assign(t.begin(), t.begin() + q);
    return desc;
}

Vec3 eval_fourier(const FourierDescriptor& desc, double l) {
    if (!std::isfinite(l)) throw std::invalid_argument("eval_fourier: l must be finite");
    if (desc.period <= 0.0) throw std::invalid_argument("eval_fourier: descriptor has no period");
    const double w = 2.0 * kPi / desc.period;
    const double lr = std::fmod(l, desc.period);
    Vec3 p = desc.bias;
    for (int n = 1; n <= desc.n_harmonics; ++n) {
        const double c = std::cos(w * n * lr);
        const double s = std::sin(w * n * lr);
        const auto& row = desc.coefficients.row(n - 1);
        p.x() += row[0] * c + row[1] * s;
        p.y() += row[2] * c + row[3] * s;
        p.z() += row[4] * c + row[5] * s;
    }
    return p;
}

MarkerShape reconstruct_markers(const FourierDescriptor& desc,
                                std::optional<std::string> label) {
    if (desc.marker_params.size() < 2)
        throw std::invalid_argument("reconstruct_markers: descriptor has no marker parameters");
    std::vector<Vec3> pts(desc.marker_params.size());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = eval_fourier(desc, desc.marker_params[i]);
    return MarkerShape(std::move(pts), std::move(label));
}

std::vector<Vec3> sample_fourier_curve(const FourierDescriptor& desc, int n_samples) {
    if (n_samples < 2) throw std::invalid_argument("sample_fourier_curve: need >= 2 samples");
    std::vector<Vec3> pts(n_samples);
    // A mirror-closed contour retraces itself; the first half period covers
    // the original polyline once.
    const double span = desc.closure == ContourClosure::Mirror ? 0.5 * desc.period : desc.period;
    for (int i = 0; i < n_samples; ++i)
        pts[i] = eval_fourier(desc, span * i / (n_samples - 1));
    return pts;
}

double fourier_reconstruction_r2(const MarkerShape& shape, int n_harmonics,
                                 ContourClosure closure) {
    const FourierDescriptor desc = fit_fourier(shape, n_harmonics, closure);
    const std::vector<Vec3> v = closed_contour(shape, closure);
    const int M = static_cast<int>(v.size()) - 1;
    Matrix obs(M, 3), pred(M, 3);
    double t = 0.0;
    for (int j = 0; j < M; ++j) {
        obs.row(j) = v[j].transpose();
        pred.row(j) = eval_fourier(desc, t).transpose();
        t += (v[j + 1] - v[j]).norm();
    }
    return r_squared(obs, pred);
}

Matrix fourier_feature_matrix(const ShapeDataset& ds, int n_harmonics, ContourClosure closure) {
    if (ds.kind != DatasetKind::Markers)
        throw std::invalid_argument("fourier_feature_matrix: marker dataset required");
    Matrix X(ds.markers.size(), 3 + 6 * n_harmonics);
    for (std::size_t i = 0; i < ds.markers.size(); ++i)
        X.row(i) = fit_fourier(ds.markers[i], n_harmonics, closure).flatten().transpose();
    return X;
}

}  // namespace softshape
