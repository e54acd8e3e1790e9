#pragma once

#include "geodesic.hpp"
#include "shape_graph.hpp"

namespace softshape {

/// One step of a planned or analyzed deformation: latent code, decoded
/// shape in raw feature space, and (when a graph is available) the kNN
/// label prediction.
struct TraceNode {
    Vector z;
    Vector shape;  // raw feature space (denormalized)
    std::optional<std::string> predicted_label;
    std::string tag;  // e.g. "dim3-" / "dim3+" halves of a feature sweep
};

struct DeformationTrace {
    std::string provenance;  // shortest-path | linear | geodesic | feature-sweep
    std::vector<TraceNode> nodes;
    double arc_length_manifold = 0.0;
    std::vector<double> energy_log;
};

DeformationTrace trace_from_curve(const LatentModel& model, const LatentCurve& curve,
                                  std::string provenance, const ShapeGraph* graph = nullptr);

/// Varies latent dimension p around h(x0) in steps of delta, n_steps in each
/// direction (both signs; each half is tagged). Nonlinear generators refine
/// each half with the discrete geodesic, endpoints fixed.
DeformationTrace semantic_feature_sweep(const LatentModel& model, const Vector& x0_raw, int p,
                                        double delta, int n_steps, const GeodesicConfig& config,
                                        const ShapeGraph* graph = nullptr);

struct PlanResult {
    DeformationTrace shortest_path;
    DeformationTrace linear;    // the geodesic's initialization
    DeformationTrace geodesic;  // equals linear for linear generators
    GeodesicReport geodesic_report;
};

/// Latent shape planning: dataset shortest path between the nearest graph
/// nodes to h(x_current) and h(x_target) (endpoints themselves prepended and
/// appended), plus a linearly initialized geodesic interpolation with
/// n_steps segments.
PlanResult plan_shape_path(const ShapeGraph& graph, const LatentModel& model,
                           const Vector& x_current_raw, const Vector& x_target_raw, int n_steps,
                           const GeodesicConfig& config);

/// Category itinerary of a trace: every node classified, consecutive
/// duplicates collapsed.
std::vector<std::string> trace_labels(const DeformationTrace& trace, const ShapeGraph& graph);

}  // namespace softshape
