#include "pca.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "fourier.hpp"

namespace softshape {

int FeatureSpace::dim() const {
    switch (kind) {
        case Kind::MarkerRaw: return 3 * q;
        case Kind::Fourier: return 3 + 6 * harmonics;
        case Kind::CloudRaw: return 3 * resolution;
    }
    throw std::logic_error("bad feature space");
}

std::string FeatureSpace::name() const {
    switch (kind) {
        case Kind::MarkerRaw: return "markers";
        case Kind::Fourier: return "fourier";
        case Kind::CloudRaw: return "cloud";
    }
    throw std::logic_error("bad feature space");
}

FeatureSpace FeatureSpace::marker_raw(int q) {
    FeatureSpace s;
    s.kind = Kind::MarkerRaw;
    s.q = q;
    return s;
}

FeatureSpace FeatureSpace::fourier(int q, int harmonics) {
    FeatureSpace s;
    s.kind = Kind::Fourier;
    s.q = q;
    s.harmonics = harmonics;
    return s;
}

FeatureSpace FeatureSpace::cloud_raw(int resolution) {
    FeatureSpace s;
    s.kind = Kind::CloudRaw;
    s.resolution = resolution;
    return s;
}

PcaModel::PcaModel(Vector mean, Matrix components, Vector variances, int k, FeatureSpace space,
                   NormalizationRecord norm)
    : mean_(std::move(mean)),
      components_(std::move(components)),
      variances_(std::move(variances)),
      space_(std::move(space)),
      norm_(std::move(norm)) {
    if (components_.cols() != mean_.size())
        throw std::invalid_argument("PcaModel: component width must match mean size");
    if (components_.rows() != variances_.size())
        throw std::invalid_argument("PcaModel: one variance per component required");
    for (Eigen::Index i = 1; i < variances_.size(); ++i)
        if (variances_[i] > variances_[i - 1] + 1e-12)
            throw std::invalid_argument("PcaModel: variances must be non-increasing");
    set_k(k);
}

void PcaModel::set_k(int k) {
    if (k < 1 || k > stored_components())
        throw std::invalid_argument("PcaModel: k must be in [1, stored components]");
    k_ = k;
}

Vector PcaModel::encode(const Vector& x) const {
    const Vector xn = norm_.apply(x);
    if (xn.size() != mean_.size())
        throw std::invalid_argument("PcaModel::encode: dimension mismatch");
    return components_.topRows(k_) * (xn - mean_);
}

Vector PcaModel::decode(const Vector& z) const {
    if (z.size() != k_) throw std::invalid_argument("PcaModel::decode: dimension mismatch");
    return components_.topRows(k_).transpose() * z + mean_;
}

Matrix PcaModel::decoder_jacobian(const Vector& z) const {
    if (z.size() != k_)
        throw std::invalid_argument("PcaModel::decoder_jacobian: dimension mismatch");
    return components_.topRows(k_).transpose();
}

double PcaModel::explained_variance(int k) const {
    if (k < 1 || k > stored_components())
        throw std::invalid_argument("explained_variance: k out of range");
    const double total = variances_.sum();
    if (total <= 0.0) throw std::invalid_argument("explained_variance: zero total variance");
    return variances_.head(k).sum() / total;
}

int PcaModel::select_k(double threshold) const {
    for (int k = 1; k <= stored_components(); ++k)
        if (explained_variance(k) >= threshold) return k;
    return stored_components();
}

namespace {

// Largest-magnitude entry of each component made positive, so results do not
// depend on the linear-algebra backend's sign choices.
void fix_signs(Matrix& components) {
    for (Eigen::Index i = 0; i < components.rows(); ++i) {
        Eigen::Index argmax = 0;
        components.row(i).cwiseAbs().maxCoeff(&argmax);
        if (components(i, argmax) < 0.0) components.row(i) = -components.row(i);
    }
}

}  // namespace

PcaModel fit_pca(const Matrix& X, int k) {
    const Eigen::Index p = X.rows(), n = X.cols();
    if (p < 2) throw std::invalid_argument("fit_pca: need at least 2 samples");
    if (n < 1) throw std::invalid_argument("fit_pca: need at least 1 feature");

    const Vector mean = X.colwise().mean().transpose();
    const Matrix Xc = X.rowwise() - mean.transpose();

    Matrix components;
    Vector variances;
    if (n <= p) {
        Eigen::BDCSVD<Matrix> svd(Xc, Eigen::ComputeThinV);
        components = svd.matrixV().transpose();  // n x n, rows = components
        variances = svd.singularValues().array().square() / double(p - 1);
    } else {
        // Gram route: eigen-decompose the p x p matrix Xc Xc^T and map the
        // sample-space eigenvectors back to feature space.
        const Matrix gram = Xc * Xc.transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
        const Vector evals = eig.eigenvalues();  // ascending
        const Matrix evecs = eig.eigenvectors();
        const double tol = std::max(evals.cwiseAbs().maxCoeff(), 1.0) * 1e-12;
        std::vector<std::pair<double, Eigen::Index>> order;
        for (Eigen::Index i = p - 1; i >= 0; --i) order.push_back({evals[i], i});
        components.resize(p, n);
        variances.resize(p);
        Eigen::Index r = 0;
        for (const auto& [lambda, idx] : order) {
            if (lambda <= tol) break;  // null directions are not recoverable
            const double sigma = std::sqrt(lambda);
            components.row(r) = (Xc.transpose() * evecs.col(idx)).transpose() / sigma;
            variances[r] = lambda / double(p - 1);
            ++r;
        }
        components.conservativeResize(r, n);
        variances.conservativeResize(r);
        if (r == 0) throw std::invalid_argument("fit_pca: data has zero variance");
    }
    fix_signs(components);
    if (k <= 0) k = static_cast<int>(components.rows());
    return PcaModel(mean, std::move(components), std::move(variances), k);
}

PcaModel fit_pca_dataset(const ShapeDataset& ds, int k, bool use_fourier, int harmonics) {
    if (ds.kind == DatasetKind::Cloud)
        throw std::invalid_argument("fit_pca_dataset: PCA applies only to ordered features, "
                                    "not point clouds");
    const int q = ds.marker_dim();
    Matrix X = use_fourier ? fourier_feature_matrix(ds, harmonics) : ds.feature_matrix();
    PcaModel model = fit_pca(X, k);
    model.set_feature_space(use_fourier ? FeatureSpace::fourier(q, harmonics)
                                        : FeatureSpace::marker_raw(q));
    return model;
}

}  // namespace softshape
