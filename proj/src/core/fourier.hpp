#pragma once

#include "types.hpp"

namespace softshape {

/// How an open marker polyline is turned into the closed contour the Fourier
/// integrals require. Mirror walks the markers forward then backward (period
/// twice the polyline length, no endpoint discontinuity); Closed joins the
/// last marker straight back to the first.
enum class ContourClosure { Mirror, Closed };

/// Truncated per-axis Fourier series of a closed 3D contour,
///   x(l) = a0 + sum_n a_n cos(w n l) + b_n sin(w n l)   (same for y with
///   c,d and z with e,f), w = 2 pi / L.
struct FourierDescriptor {
    int n_harmonics = 0;
    Vec3 bias = Vec3::Zero();                   // (a0, c0, e0)
    Matrix coefficients;                        // N x 6: a_n b_n c_n d_n e_n f_n
    double period = 0.0;                        // L, closed-path chord length
    std::vector<double> marker_params;          // arc parameter of each input marker
    ContourClosure closure = ContourClosure::Mirror;
    bool over_parameterized = false;            // 3 + 6N > 3q

    /// 3 + 6N entries: a0, c0, e0, then a_n, b_n, c_n, d_n, e_n, f_n per
    /// harmonic. The period is not part of the feature vector.
    Vector flatten() const;
    static FourierDescriptor from_flat(const Vector& flat, double period = 1.0);
};

/// Fits the descriptor by the closed-form piecewise-linear Fourier integrals
/// applied independently to x(l), y(l), z(l) over the chord-length
/// parameterized closed contour. Bias terms are the parameterized mean of
/// the contour.
FourierDescriptor fit_fourier(const MarkerShape& shape, int n_harmonics,
                              ContourClosure closure = ContourClosure::Mirror);

/// Evaluates the three series at arc parameter l (periodic in the fitted
/// period).
Vec3 eval_fourier(const FourierDescriptor& desc, double l);

/// Reconstruction of the original markers: evaluation at the stored marker
/// parameters.
MarkerShape reconstruct_markers(const FourierDescriptor& desc,
                                std::optional<std::string> label = std::nullopt);

/// Marker-space points sampled densely over one period (for rendering a
/// descriptor that has no stored marker parameters, e.g. after decoding).
std::vector<Vec3> sample_fourier_curve(const FourierDescriptor& desc, int n_samples);

/// Fourier feature matrix of a marker dataset: one flattened descriptor per
/// row.
Matrix fourier_feature_matrix(const ShapeDataset& ds, int n_harmonics,
                              ContourClosure closure = ContourClosure::Mirror);

/// Reconstruction R^2 at the marker points along the fitted contour (every
/// vertex of the closed traversal; the mirrored walk visits the interior
/// markers twice). Non-decreasing in the harmonic count.
double fourier_reconstruction_r2(const MarkerShape& shape, int n_harmonics,
                                 ContourClosure closure = ContourClosure::Mirror);

}  // namespace softshape
