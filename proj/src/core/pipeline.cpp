#include "pipeline.hpp"

#include "fourier.hpp"
#include "sampling.hpp"

namespace softshape {

Vector model_features_for_shape(const LatentModel& model, const ShapeDataset& ds,
                                std::size_t i) {
    if (i >= ds.size()) throw std::invalid_argument("shape index out of range");
    const FeatureSpace& space = model.feature_space();
    switch (space.kind) {
        case FeatureSpace::Kind::MarkerRaw: {
            if (ds.kind != DatasetKind::Markers)
                throw std::invalid_argument("model expects marker shapes");
            const MarkerShape& s = ds.markers[i];
            if (s.marker_count() != space.q)
                throw std::invalid_argument("shape has q=" + std::to_string(s.marker_count()) +
                                            ", model expects q=" + std::to_string(space.q));
            return s.flatten();
        }
        case FeatureSpace::Kind::Fourier: {
            if (ds.kind != DatasetKind::Markers)
                throw std::invalid_argument("model expects marker shapes");
            return fit_fourier(ds.markers[i], space.harmonics).flatten();
        }
        case FeatureSpace::Kind::CloudRaw: {
            if (ds.kind != DatasetKind::Cloud)
                throw std::invalid_argument("model expects point clouds");
            const PointCloud& c = ds.clouds[i];
            if (c.size() == space.resolution) return c.flatten();
            return farthest_point_sample(c, space.resolution).flatten();
        }
    }
    throw std::logic_error("bad feature space");
}

Matrix model_features_for_dataset(const LatentModel& model, const ShapeDataset& ds) {
    if (ds.empty()) throw std::invalid_argument("empty dataset");
    Matrix X(ds.size(), model.feature_space().dim());
    for (std::size_t i = 0; i < ds.size(); ++i)
        X.row(i) = model_features_for_shape(model, ds, i).transpose();
    return X;
}

Matrix encode_dataset(const LatentModel& model, const ShapeDataset& ds) {
    const Matrix X = model_features_for_dataset(model, ds);
    Matrix Z(X.rows(), model.latent_dim());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        Z.row(i) = model.encode(X.row(i).transpose()).transpose();
    return Z;
}

ShapeGraph build_graph(const LatentModel& model, const ShapeDataset& ds, int k_g,
                       bool weight_by_ambient, bool bridge_components) {
    const Matrix Z = encode_dataset(model, ds);
    std::vector<std::optional<std::string>> labels(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) labels[i] = ds.label_of(i);
    return ShapeGraph::build(Z, labels, k_g, weight_by_ambient ? &model : nullptr,
                             bridge_components);
}

}  // namespace softshape
