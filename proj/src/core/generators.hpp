#pragma once

#include <array>
#include <cstdint>

#include "types.hpp"

namespace softshape {

/// Deformation categories of the synthetic foam-bar taxonomy.
enum class BarCategory { Line, ArchPos, ArchNeg, SPos, SNeg, HelixPos, HelixNeg };

/// Deformation categories of the synthetic foam-sheet taxonomy.
enum class SheetCategory {
    Plane, Bend1Pos, Bend1Neg, Bend2Pos, Bend2Neg, Fold1Pos, Fold1Neg, Fold2Pos, Fold2Neg
};

BarCategory parse_bar_category(const std::string& name);
SheetCategory parse_sheet_category(const std::string& name);
std::string to_string(BarCategory c);
std::string to_string(SheetCategory c);

/// Up to four real deformation parameters; unused entries are ignored.
using Dof = std::array<double, 4>;

/// Samples q markers at equal arc-length increments along a unit-length
/// parametric curve. The curve is an exact closed form per category:
///
///   line    segment along (cos b, sin b, 0);        dof = (b, -, -, -)
///   arch+-  planar circular arc of curvature kappa; dof = (kappa, b, -, -)
///   s+-     planar cubic with an inflection point,
///           peak transverse deviation A;            dof = (A, b, -, -)
///   helix+- unit-speed circular helix, w turns,
///           radius r (right-handed for helix+);     dof = (w, r, -, -)
///
/// b rotates the curve about the z axis. The seed is accepted for interface
/// uniformity; bar curves are fully determined by (category, dof).
MarkerShape generate_bar_shape(BarCategory category, const Dof& dof, int q, std::uint64_t seed);

/// Samples n_raw surface points of a unit sheet, uv drawn uniformly from the
/// seeded generator. Categories:
///
///   plane    flat sheet z = 0
///   bend1+-  cylindrical bend across x, curvature kappa; dof = (kappa, -, -, -)
///   bend2+-  cylindrical bend across y
///   fold1+-  dihedral fold at x = 0, fold angle theta;   dof = (theta, -, -, -)
///   fold2+-  dihedral fold at y = 0
PointCloud generate_sheet_cloud(SheetCategory category, const Dof& dof, int n_raw,
                                std::uint64_t seed);

/// Documented dof draw ranges used by the dataset generators.
struct DofRange {
    double lo = 0.0, hi = 0.0;
};
DofRange bar_primary_dof_range(BarCategory c);

/// Full seven-class bar dataset: per_class shapes per category, dofs drawn
/// from the documented ranges with a single seeded stream.
ShapeDataset generate_bar_dataset(int per_class, int q, std::uint64_t seed);

/// Full nine-class sheet dataset. When resample_to > 0, every cloud is
/// farthest-point resampled to that resolution.
ShapeDataset generate_sheet_dataset(int per_class, int n_raw, std::uint64_t seed,
                                    int resample_to = 0);

/// Arc length from marker i to i+1 along the polyline.
std::vector<double> chord_lengths(const MarkerShape& s);

}  // namespace softshape
