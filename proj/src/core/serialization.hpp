#pragma once

#include <memory>

#include "autoencoder.hpp"
#include "pca.hpp"
#include "planner.hpp"
#include "shape_graph.hpp"

namespace softshape {

// Dataset files. Markers: {kind:"markers", q, shapes:[{label, points:[[x,y,z],...]},...]}.
// Clouds: {kind:"cloud", shapes:[...]}, optionally with points stored in a
// little-endian float32 sidecar referenced by filename.
void save_dataset(const ShapeDataset& ds, const std::string& path, bool binary_sidecar = false);
ShapeDataset load_dataset(const std::string& path);

/// One shape per row, flattened features, label in the last column.
void export_dataset_csv(const ShapeDataset& ds, const std::string& path);

// Model checkpoints: {kind:"pca", mean, components (row-major), variances, k, ...}
// or {kind:"autoencoder", arch, parameters, normalization, training_log, ...}.
void save_model(const LatentModel& model, const std::string& path);
std::unique_ptr<LatentModel> load_model(const std::string& path);

void save_graph(const ShapeGraph& graph, const std::string& path);
ShapeGraph load_graph(const std::string& path);

// Trace files: {provenance, nodes:[{z, shape, label}...], arc_length_manifold, energy_log}.
void save_trace(const DeformationTrace& trace, const FeatureSpace& space,
                const std::string& path);
struct LoadedTrace {
    DeformationTrace trace;
    FeatureSpace space;
};
LoadedTrace load_trace(const std::string& path);

/// Whitespace/comma separated numbers, any layout.
Vector load_vector_csv(const std::string& path);
void save_vector_csv(const Vector& v, const std::string& path);

/// One row per line, full double precision; optional string last column.
void save_matrix_csv(const Matrix& m, const std::string& path,
                     const std::vector<std::string>& last_column = {});

/// FNV-1a 64-bit content hash, hex encoded (run manifests).
std::string file_hash_hex(const std::string& path);

}  // namespace softshape
