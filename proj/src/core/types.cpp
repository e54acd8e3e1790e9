#include "types.hpp"

#include <cmath>

namespace softshape {

void require_finite(const Vec3& p, const char* what) {
    if (!p.allFinite())
        throw std::invalid_argument(std::string(what) + ": coordinates must be finite");
}

MarkerShape::MarkerShape(std::vector<Vec3> pts, std::optional<std::string> lbl)
    : points(std::move(pts)), label(std::move(lbl)) {
    if (points.size() < 2)
        throw std::invalid_argument("MarkerShape: needs at least 2 markers");
    for (const auto& p : points) require_finite(p, "MarkerShape");
}

Vector MarkerShape::flatten() const {
    Vector row(3 * points.size());
    for (std::size_t i = 0; i < points.size(); ++i) row.segment<3>(3 * i) = points[i];
    return row;
}

MarkerShape MarkerShape::from_row(const Vector& row, std::optional<std::string> lbl) {
    if (row.size() % 3 != 0 || row.size() < 6)
        throw std::invalid_argument("MarkerShape::from_row: length must be 3q with q >= 2");
    std::vector<Vec3> pts(row.size() / 3);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = row.segment<3>(3 * i);
    return MarkerShape(std::move(pts), std::move(lbl));
}

PointCloud::PointCloud(std::vector<Vec3> pts, std::optional<std::string> lbl)
    : points(std::move(pts)), label(std::move(lbl)) {
    for (const auto& p : points) require_finite(p, "PointCloud");
}

Vector PointCloud::flatten() const {
    Vector row(3 * points.size());
    for (std::size_t i = 0; i < points.size(); ++i) row.segment<3>(3 * i) = points[i];
    return row;
}

PointCloud PointCloud::from_row(const Vector& row, std::optional<std::string> lbl) {
    if (row.size() % 3 != 0)
        throw std::invalid_argument("PointCloud::from_row: length must be a multiple of 3");
    std::vector<Vec3> pts(row.size() / 3);
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = row.segment<3>(3 * i);
    return PointCloud(std::move(pts), std::move(lbl));
}

std::size_t ShapeDataset::size() const {
    return kind == DatasetKind::Markers ? markers.size() : clouds.size();
}

std::map<std::string, int> ShapeDataset::category_table() const {
    std::map<std::string, int> table;
    if (kind == DatasetKind::Markers) {
        for (const auto& s : markers)
            if (s.label) ++table[*s.label];
    } else {
        for (const auto& c : clouds)
            if (c.label) ++table[*c.label];
    }
    return table;
}

int ShapeDataset::marker_dim() const {
    if (kind != DatasetKind::Markers)
        throw std::invalid_argument("marker_dim: not a marker dataset");
    if (markers.empty()) throw std::invalid_argument("marker_dim: empty dataset");
    int q = markers.front().marker_count();
    for (std::size_t i = 1; i < markers.size(); ++i)
        if (markers[i].marker_count() != q)
            throw std::runtime_error("dataset: shape " + std::to_string(i) + " has q=" +
                                     std::to_string(markers[i].marker_count()) +
                                     ", expected q=" + std::to_string(q));
    return q;
}

const std::optional<std::string>& ShapeDataset::label_of(std::size_t i) const {
    return kind == DatasetKind::Markers ? markers.at(i).label : clouds.at(i).label;
}

Matrix ShapeDataset::feature_matrix() const {
    if (empty()) throw std::invalid_argument("feature_matrix: empty dataset");
    if (kind == DatasetKind::Markers) {
        int q = marker_dim();
        Matrix X(markers.size(), 3 * q);
        for (std::size_t i = 0; i < markers.size(); ++i) X.row(i) = markers[i].flatten();
        return X;
    }
    int n = clouds.front().size();
    for (std::size_t i = 1; i < clouds.size(); ++i)
        if (clouds[i].size() != n)
            throw std::runtime_error("dataset: cloud " + std::to_string(i) +
                                     " has inconsistent point count; resample first");
    Matrix X(clouds.size(), 3 * n);
    for (std::size_t i = 0; i < clouds.size(); ++i) X.row(i) = clouds[i].flatten();
    return X;
}

int NormalizationRecord::feature_count() const {
    return mode == NormalizationMode::MinMax ? static_cast<int>(feat_min.size())
                                             : static_cast<int>(feat_mean.size());
}

NormalizationRecord NormalizationRecord::identity() {
    NormalizationRecord rec;
    rec.identity_ = true;
    rec.mode = NormalizationMode::MeanCenter;
    rec.feat_mean = Vector();
    return rec;
}

Vector NormalizationRecord::apply(const Vector& x) const {
    if (identity_) return x;
    if (x.size() != feature_count())
        throw std::invalid_argument("NormalizationRecord::apply: dimension mismatch");
    if (mode == NormalizationMode::MeanCenter) return x - feat_mean;
    Vector y(x.size());
    for (int j = 0; j < x.size(); ++j) {
        if (constant_flag[j]) {
            y[j] = 0.5 * (lo + hi);
        } else {
            y[j] = lo + (x[j] - feat_min[j]) / (feat_max[j] - feat_min[j]) * (hi - lo);
        }
    }
    return y;
}

Vector NormalizationRecord::invert(const Vector& y) const {
    if (identity_) return y;
    if (y.size() != feature_count())
        throw std::invalid_argument("NormalizationRecord::invert: dimension mismatch");
    if (mode == NormalizationMode::MeanCenter) return y + feat_mean;
    Vector x(y.size());
    for (int j = 0; j < y.size(); ++j) {
        if (constant_flag[j]) {
            x[j] = feat_min[j];  // constant value was recorded in feat_min == feat_max
        } else {
            x[j] = feat_min[j] + (y[j] - lo) / (hi - lo) * (feat_max[j] - feat_min[j]);
        }
    }
    return x;
}

Matrix NormalizationRecord::apply_rows(const Matrix& X) const {
    Matrix Y(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) Y.row(i) = apply(X.row(i).transpose()).transpose();
    return Y;
}

Matrix NormalizationRecord::invert_rows(const Matrix& Y) const {
    Matrix X(Y.rows(), Y.cols());
    for (Eigen::Index i = 0; i < Y.rows(); ++i) X.row(i) = invert(Y.row(i).transpose()).transpose();
    return X;
}

std::pair<Matrix, NormalizationRecord> normalize_features(const Matrix& X, NormalizationMode mode,
                                                          double lo, double hi) {
    if (X.rows() == 0 || X.cols() == 0)
        throw std::invalid_argument("normalize_features: empty matrix");
    NormalizationRecord rec;
    rec.mode = mode;
    rec.lo = lo;
    rec.hi = hi;
    if (mode == NormalizationMode::MeanCenter) {
        rec.feat_mean = X.colwise().mean().transpose();
    } else {
        rec.feat_min = X.colwise().minCoeff().transpose();
        rec.feat_max = X.colwise().maxCoeff().transpose();
        rec.constant_flag.resize(X.cols());
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            rec.constant_flag[j] = (rec.feat_max[j] == rec.feat_min[j]);
    }
    return {rec.apply_rows(X), rec};
}

NormalizationRecord tile_channel_record(const NormalizationRecord& rec, int n_points) {
    if (rec.is_identity()) return rec;
    if (rec.feature_count() != 3)
        throw std::invalid_argument("tile_channel_record: expected a 3-channel record");
    NormalizationRecord out;
    out.mode = rec.mode;
    out.lo = rec.lo;
    out.hi = rec.hi;
    auto tile = [n_points](const Vector& v) {
        if (v.size() == 0) return v;
        Vector t(3 * n_points);
        for (int i = 0; i < n_points; ++i) t.segment<3>(3 * i) = v;
        return t;
    };
    out.feat_min = tile(rec.feat_min);
    out.feat_max = tile(rec.feat_max);
    out.feat_mean = tile(rec.feat_mean);
    if (!rec.constant_flag.empty()) {
        out.constant_flag.resize(3 * n_points);
        for (int i = 0; i < n_points; ++i)
            for (int c = 0; c < 3; ++c) out.constant_flag[3 * i + c] = rec.constant_flag[c];
    }
    return out;
}

std::pair<ShapeDataset, NormalizationRecord> normalize_dataset(const ShapeDataset& ds,
                                                               NormalizationMode mode,
                                                               double lo, double hi) {
    if (ds.empty()) throw std::invalid_argument("normalize_dataset: empty dataset");
    ShapeDataset out = ds;
    if (ds.kind == DatasetKind::Markers) {
        auto [Y, rec] = normalize_features(ds.feature_matrix(), mode, lo, hi);
        for (std::size_t i = 0; i < out.markers.size(); ++i)
            out.markers[i] = MarkerShape::from_row(Y.row(i).transpose(), out.markers[i].label);
        return {std::move(out), rec};
    }
    // Per-channel statistics pooled over every point of every cloud.
    std::size_t total = 0;
    for (const auto& c : ds.clouds) total += c.points.size();
    if (total == 0) throw std::invalid_argument("normalize_dataset: clouds are empty");
    Matrix channels(total, 3);
    std::size_t r = 0;
    for (const auto& c : ds.clouds)
        for (const auto& p : c.points) channels.row(r++) = p.transpose();
    auto [unused, rec] = normalize_features(channels, mode, lo, hi);
    (void)unused;
    for (auto& c : out.clouds)
        for (auto& p : c.points) p = rec.apply(Vector(p));
    return {std::move(out), rec};
}

}  // namespace softshape
