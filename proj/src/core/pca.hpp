#pragma once

#include "latent_model.hpp"

namespace softshape {

/// Linear latent model: orthonormal principal components of a mean-centered
/// feature matrix, with explained-variance component selection.
class PcaModel final : public LatentModel {
public:
    PcaModel() = default;
    PcaModel(Vector mean, Matrix components, Vector variances, int k,
             FeatureSpace space = {},
             NormalizationRecord norm = NormalizationRecord::identity());

    // LatentModel
    int latent_dim() const override { return k_; }
    int ambient_dim() const override { return static_cast<int>(mean_.size()); }
    Vector encode(const Vector& x) const override;
    Vector decode(const Vector& z) const override;
    Vector reconstruct(const Vector& z) const override { return norm_.invert(decode(z)); }
    Matrix decoder_jacobian(const Vector& z) const override;
    bool is_linear() const override { return true; }
    const FeatureSpace& feature_space() const override { return space_; }
    const NormalizationRecord& normalization() const override { return norm_; }
    std::string kind() const override { return "pca"; }

    const Vector& mean() const { return mean_; }
    /// All stored components, one orthonormal row per component, variances
    /// descending.
    const Matrix& components() const { return components_; }
    const Vector& variances() const { return variances_; }
    int stored_components() const { return static_cast<int>(components_.rows()); }

    void set_k(int k);
    void set_feature_space(FeatureSpace space) { space_ = std::move(space); }

    /// Fraction of total variance captured by the top-k components.
    double explained_variance(int k) const;
    /// Smallest k with explained variance >= threshold.
    int select_k(double threshold) const;

private:
    Vector mean_;
    Matrix components_;  // r x n
    Vector variances_;   // r, descending
    int k_ = 0;
    FeatureSpace space_;
    NormalizationRecord norm_ = NormalizationRecord::identity();
};

/// Fits all recoverable components of the p x n feature matrix by SVD of the
/// mean-centered data (Gram-matrix route when n > p). Deterministic sign
/// convention: each component's entry of largest magnitude is positive.
PcaModel fit_pca(const Matrix& X, int k = 0);

/// Dataset-level fit. Rejects unordered point-cloud datasets: PCA applies
/// only to ordered features.
PcaModel fit_pca_dataset(const ShapeDataset& ds, int k, bool use_fourier, int harmonics);

}  // namespace softshape
