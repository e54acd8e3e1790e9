#pragma once

#include "latent_model.hpp"
#include "shape_graph.hpp"

namespace softshape {

/// Raw feature vector of dataset shape i in the model's feature space
/// (marker flattening, Fourier fitting, or cloud resampling as needed).
Vector model_features_for_shape(const LatentModel& model, const ShapeDataset& ds, std::size_t i);

/// Feature matrix of the whole dataset in the model's feature space.
Matrix model_features_for_dataset(const LatentModel& model, const ShapeDataset& ds);

/// Latent codes of every dataset shape (rows).
Matrix encode_dataset(const LatentModel& model, const ShapeDataset& ds);

/// kNN graph over the encoded dataset. weight_by_ambient switches edge
/// weights from latent to decoded ambient distances; bridge_components
/// repairs disconnected cluster islands (see ShapeGraph::build).
ShapeGraph build_graph(const LatentModel& model, const ShapeDataset& ds, int k_g,
                       bool weight_by_ambient = false, bool bridge_components = true);

}  // namespace softshape
