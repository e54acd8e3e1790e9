#pragma once

#include "planner.hpp"

namespace softshape {

/// Small-multiples rendering of a deformation trace: one panel per node,
/// 3D points orthographically projected onto the two highest-variance axes.
/// Ordered shapes draw as polylines (Fourier features are sampled back to a
/// curve), clouds as dots. No plotting dependency; plain SVG.
void render_trace_svg(const DeformationTrace& trace, const FeatureSpace& space,
                      const std::string& path);

}  // namespace softshape
