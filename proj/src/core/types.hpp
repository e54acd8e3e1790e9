#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace softshape {

using Vec3 = Eigen::Vector3d;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Ordered sequence of 3D marker points along a deformable bar.
/// Flattens to a feature row of 3q entries in x1,y1,z1,...,xq,yq,zq order.
struct MarkerShape {
    std::vector<Vec3> points;
    std::optional<std::string> label;

    MarkerShape() = default;
    MarkerShape(std::vector<Vec3> pts, std::optional<std::string> lbl = std::nullopt);

    int marker_count() const { return static_cast<int>(points.size()); }
    Vector flatten() const;
    static MarkerShape from_row(const Vector& row, std::optional<std::string> lbl = std::nullopt);
};

/// Unordered set of 3D points sampled from a sheet surface.
struct PointCloud {
    std::vector<Vec3> points;
    std::optional<std::string> label;

    PointCloud() = default;
    PointCloud(std::vector<Vec3> pts, std::optional<std::string> lbl = std::nullopt);

    int size() const { return static_cast<int>(points.size()); }
    Vector flatten() const;
    static PointCloud from_row(const Vector& row, std::optional<std::string> lbl = std::nullopt);
};

enum class DatasetKind { Markers, Cloud };

enum class NormalizationMode { MinMax, MeanCenter };

/// Per-feature statistics sufficient to invert a normalization exactly.
/// MinMax maps each feature into [lo,hi]; constant features (zero range)
/// map to the midpoint and are flagged so inversion restores the constant.
struct NormalizationRecord {
    NormalizationMode mode = NormalizationMode::MinMax;
    double lo = 0.1;
    double hi = 0.9;
    Vector feat_min;        // MinMax
    Vector feat_max;        // MinMax
    Vector feat_mean;       // MeanCenter
    std::vector<bool> constant_flag;

    int feature_count() const;
    Vector apply(const Vector& x) const;
    Vector invert(const Vector& y) const;
    Matrix apply_rows(const Matrix& X) const;
    Matrix invert_rows(const Matrix& Y) const;

    /// Identity record (no-op transform), used by models fit on raw features.
    static NormalizationRecord identity();
    bool is_identity() const { return identity_; }

private:
    bool identity_ = false;
};

/// Homogeneous collection of shapes with a category table.
struct ShapeDataset {
    DatasetKind kind = DatasetKind::Markers;
    std::vector<MarkerShape> markers;   // used when kind == Markers
    std::vector<PointCloud> clouds;     // used when kind == Cloud

    std::size_t size() const;
    bool empty() const { return size() == 0; }

    /// label -> count over all labeled items
    std::map<std::string, int> category_table() const;

    /// Marker count q shared by every shape; throws on inconsistency.
    int marker_dim() const;

    const std::optional<std::string>& label_of(std::size_t i) const;

    /// Flattened feature matrix. Clouds must share a common point count
    /// (resample first); markers a common q.
    Matrix feature_matrix() const;
};

/// Normalizes every feature column of X.
///
/// For cloud data the caller should pass per-channel granularity (3 columns:
/// x,y,z pooled over points) so the transform is permutation-equivariant; see
/// normalize_dataset.
std::pair<Matrix, NormalizationRecord> normalize_features(const Matrix& X,
                                                          NormalizationMode mode,
                                                          double lo = 0.1, double hi = 0.9);

/// Normalizes a dataset in feature space and returns the transformed copy
/// plus the record. Marker datasets normalize per flattened feature; cloud
/// datasets normalize per coordinate channel (x,y,z share statistics across
/// points, keeping the transform permutation-equivariant).
std::pair<ShapeDataset, NormalizationRecord> normalize_dataset(const ShapeDataset& ds,
                                                               NormalizationMode mode,
                                                               double lo = 0.1, double hi = 0.9);

/// Expands a per-channel (3-feature) record to a per-slot record of width 3n
/// by tiling, so it can be applied to flattened cloud rows.
NormalizationRecord tile_channel_record(const NormalizationRecord& rec, int n_points);

void require_finite(const Vec3& p, const char* what);

}  // namespace softshape
