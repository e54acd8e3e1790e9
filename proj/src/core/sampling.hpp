#pragma once

#include <cstdint>

#include "types.hpp"

namespace softshape {

/// Greedy farthest-point subsampling to exactly n points.
///
/// The seed point is the lexicographically smallest point (deterministic);
/// each step adds the point maximizing the minimum distance to the selected
/// set, ties broken by lexicographically smaller coordinates. Output order is
/// selection order. With randomize=true the seed point is drawn from the
/// given RNG seed instead.
PointCloud farthest_point_sample(const PointCloud& cloud, int n, bool randomize = false,
                                 std::uint64_t seed = 0);

/// Symmetric sum of squared nearest-neighbor distances (sum, not mean).
/// Dispatches to the grid index when both clouds have >= 256 points.
double chamfer_distance(const PointCloud& a, const PointCloud& b);

double chamfer_distance_bruteforce(const PointCloud& a, const PointCloud& b);
double chamfer_distance_grid(const PointCloud& a, const PointCloud& b);

/// Chamfer distance of many pairs; may evaluate pairs in parallel (capped by
/// SOFTSHAPE_THREADS). Results are independent of the schedule.
std::vector<double> chamfer_distance_batch(const std::vector<const PointCloud*>& as,
                                           const std::vector<const PointCloud*>& bs);

/// Exact nearest neighbor index in `pts` for each query row; shared by the
/// chamfer implementations and the chamfer loss gradient.
std::vector<int> nearest_neighbor_indices(const std::vector<Vec3>& queries,
                                          const std::vector<Vec3>& pts);

}  // namespace softshape
