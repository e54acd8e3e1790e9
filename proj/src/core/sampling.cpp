#include "sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "parallel.hpp"

namespace softshape {

namespace {

bool lex_less(const Vec3& a, const Vec3& b) {
    if (a.x() != b.x()) return a.x() < b.x();
    if (a.y() != b.y()) return a.y() < b.y();
    return a.z() < b.z();
}

// Uniform grid over a fixed point set supporting exact nearest-neighbor
// queries via expanding Chebyshev shells.
class PointGrid {
public:
    explicit PointGrid(const std::vector<Vec3>& pts) : pts_(pts) {
        lo_ = pts[0];
        Vec3 hi = pts[0];
        for (const auto& p : pts) {
            lo_ = lo_.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        const Vec3 extent = hi - lo_;
        const double target = std::cbrt(static_cast<double>(pts.size()));
        const double max_extent = std::max({extent.x(), extent.y(), extent.z()});
        cell_ = max_extent > 0.0 ? max_extent / target : 1.0;
        if (cell_ <= 0.0) cell_ = 1.0;
        for (int d = 0; d < 3; ++d)
            dims_[d] = std::max(1, static_cast<int>(std::floor(extent[d] / cell_)) + 1);
        cells_.assign(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2], {});
        for (std::size_t i = 0; i < pts.size(); ++i)
            cells_[cell_index(coords(pts[i]))].push_back(static_cast<int>(i));
    }

    int nearest(const Vec3& q) const {
        const std::array<int, 3> c = coords(q);
        double best = std::numeric_limits<double>::infinity();
        int best_idx = -1;
        const int max_shell = dims_[0] + dims_[1] + dims_[2];
        for (int r = 0; r <= max_shell; ++r) {
            // Any point in shell r is at distance >= (r-1)*cell from q.
            if (best_idx >= 0 && static_cast<double>(r - 1) * cell_ > std::sqrt(best)) break;
            bool any_cell = false;
            for_shell(c, r, [&](const std::array<int, 3>& cc) {
                any_cell = true;
                for (int idx : cells_[cell_index(cc)]) {
                    const double d = (pts_[idx] - q).squaredNorm();
                    if (d < best) {
                        best = d;
                        best_idx = idx;
                    }
                }
            });
            if (!any_cell && best_idx >= 0) break;
        }
        return best_idx;
    }

private:
    std::array<int, 3> coords(const Vec3& p) const {
        std::array<int, 3> c;
        for (int d = 0; d < 3; ++d) {
            int v = static_cast<int>(std::floor((p[d] - lo_[d]) / cell_));
            c[d] = std::clamp(v, 0, dims_[d] - 1);
        }
        return c;
    }

    std::size_t cell_index(const std::array<int, 3>& c) const {
        return (static_cast<std::size_t>(c[0]) * dims_[1] + c[1]) * dims_[2] + c[2];
    }

    template <typename F>
    void for_shell(const std::array<int, 3>& c, int r, F&& fn) const {
        const int x0 = c[0] - r, x1 = c[0] + r;
        const int y0 = c[1] - r, y1 = c[1] + r;
        const int z0 = c[2] - r, z1 = c[2] + r;
        for (int x = std::max(0, x0); x <= std::min(dims_[0] - 1, x1); ++x)
            for (int y = std::max(0, y0); y <= std::min(dims_[1] - 1, y1); ++y)
                for (int z = std::max(0, z0); z <= std::min(dims_[2] - 1, z1); ++z) {
                    const int cheb = std::max({std::abs(x - c[0]), std::abs(y - c[1]),
                                               std::abs(z - c[2])});
                    if (cheb == r) fn(std::array<int, 3>{x, y, z});
                }
    }

    const std::vector<Vec3>& pts_;
    Vec3 lo_;
    double cell_ = 1.0;
    std::array<int, 3> dims_{1, 1, 1};
    std::vector<std::vector<int>> cells_;
};

double directed_sum(const std::vector<Vec3>& from, const std::vector<Vec3>& to, bool use_grid) {
    double total = 0.0;
    if (use_grid) {
        PointGrid grid(to);
        for (const auto& p : from) total += (to[grid.nearest(p)] - p).squaredNorm();
    } else {
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, (q - p).squaredNorm());
            total += best;
        }
    }
    return total;
}

}  // namespace

PointCloud farthest_point_sample(const PointCloud& cloud, int n, bool randomize,
                                 std::uint64_t seed) {
    const int m = cloud.size();
    if (n < 1) throw std::invalid_argument("farthest_point_sample: n must be >= 1");
    if (m < n)
        throw std::invalid_argument("farthest_point_sample: cloud has " + std::to_string(m) +
                                    " points, need at least " + std::to_string(n));

    int first = 0;
    if (randomize) {
        std::mt19937_64 rng(seed);
        first = static_cast<int>(rng() % static_cast<std::uint64_t>(m));
    } else {
        for (int i = 1; i < m; ++i)
            if (lex_less(cloud.points[i], cloud.points[first])) first = i;
    }

    std::vector<double> min_d2(m);
    std::vector<char> taken(m, 0);
    std::vector<Vec3> out;
    out.reserve(n);

    taken[first] = 1;
    out.push_back(cloud.points[first]);
    for (int i = 0; i < m; ++i) min_d2[i] = (cloud.points[i] - cloud.points[first]).squaredNorm();

    for (int step = 1; step < n; ++step) {
        int pick = -1;
        for (int i = 0; i < m; ++i) {
            if (taken[i]) continue;
            if (pick < 0 || min_d2[i] > min_d2[pick] ||
                (min_d2[i] == min_d2[pick] && lex_less(cloud.points[i], cloud.points[pick])))
                pick = i;
        }
        taken[pick] = 1;
        out.push_back(cloud.points[pick]);
        for (int i = 0; i < m; ++i)
            if (!taken[i])
                min_d2[i] = std::min(min_d2[i], (cloud.points[i] - cloud.points[pick]).squaredNorm());
    }
    return PointCloud(std::move(out), cloud.label);
}

double chamfer_distance_bruteforce(const PointCloud& a, const PointCloud& b) {
    if (a.points.empty() || b.points.empty())
        throw std::invalid_argument("chamfer_distance: clouds must be nonempty");
    return directed_sum(a.points, b.points, false) + directed_sum(b.points, a.points, false);
}

double chamfer_distance_grid(const PointCloud& a, const PointCloud& b) {
    if (a.points.empty() || b.points.empty())
        throw std::invalid_argument("chamfer_distance: clouds must be nonempty");
    return directed_sum(a.points, b.points, true) + directed_sum(b.points, a.points, true);
}

double chamfer_distance(const PointCloud& a, const PointCloud& b) {
    if (a.points.empty() || b.points.empty())
        throw std::invalid_argument("chamfer_distance: clouds must be nonempty");
    const bool grid = a.size() >= 256 && b.size() >= 256;
    return grid ? chamfer_distance_grid(a, b) : chamfer_distance_bruteforce(a, b);
}

std::vector<double> chamfer_distance_batch(const std::vector<const PointCloud*>& as,
                                           const std::vector<const PointCloud*>& bs) {
    if (as.size() != bs.size())
        throw std::invalid_argument("chamfer_distance_batch: size mismatch");
    std::vector<double> out(as.size());
    parallel_for(as.size(), [&](std::size_t i) { out[i] = chamfer_distance(*as[i], *bs[i]); });
    return out;
}

std::vector<int> nearest_neighbor_indices(const std::vector<Vec3>& queries,
                                          const std::vector<Vec3>& pts) {
    if (pts.empty()) throw std::invalid_argument("nearest_neighbor_indices: empty point set");
    std::vector<int> out(queries.size());
    if (pts.size() >= 256) {
        PointGrid grid(pts);
        for (std::size_t i = 0; i < queries.size(); ++i) out[i] = grid.nearest(queries[i]);
    } else {
        for (std::size_t i = 0; i < queries.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            int idx = 0;
            for (std::size_t j = 0; j < pts.size(); ++j) {
                const double d = (pts[j] - queries[i]).squaredNorm();
                if (d < best) {
                    best = d;
                    idx = static_cast<int>(j);
                }
            }
            out[i] = idx;
        }
    }
    return out;
}

}  // namespace softshape
