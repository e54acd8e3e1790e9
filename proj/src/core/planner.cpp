#include "planner.hpp"

namespace softshape {

namespace {

TraceNode make_node(const LatentModel& model, const Vector& z, const ShapeGraph* graph) {
    TraceNode node;
    node.z = z;
    node.shape = model.reconstruct(z);
    if (graph && graph->size() > 0) node.predicted_label = graph->knn_classify(z).label;
    return node;
}

LatentCurve curve_from_nodes(const std::vector<Vector>& zs) {
    LatentCurve curve;
    curve.nodes.resize(zs.size(), zs[0].size());
    for (std::size_t i = 0; i < zs.size(); ++i) curve.nodes.row(i) = zs[i].transpose();
    return curve;
}

}  // namespace

DeformationTrace trace_from_curve(const LatentModel& model, const LatentCurve& curve,
                                  std::string provenance, const ShapeGraph* graph) {
    DeformationTrace trace;
    trace.provenance = std::move(provenance);
    for (int i = 0; i <= curve.segments(); ++i)
        trace.nodes.push_back(make_node(model, curve.node(i), graph));
    trace.arc_length_manifold = manifold_arc_length(model, curve);
    return trace;
}

DeformationTrace semantic_feature_sweep(const LatentModel& model, const Vector& x0_raw, int p,
                                        double delta, int n_steps, const GeodesicConfig& config,
                                        const ShapeGraph* graph) {
    if (p < 0 || p >= model.latent_dim())
        throw std::invalid_argument("semantic_feature_sweep: dimension " + std::to_string(p) +
                                    " out of range for latent dim " +
                                    std::to_string(model.latent_dim()));
    if (delta == 0.0) throw std::invalid_argument("semantic_feature_sweep: delta must be nonzero");
    if (n_steps < 0) throw std::invalid_argument("semantic_feature_sweep: n_steps must be >= 0");

    const Vector z0 = model.encode(x0_raw);
    DeformationTrace trace;
    trace.provenance = "feature-sweep";

    if (n_steps == 0) {
        TraceNode node = make_node(model, z0, graph);
        node.tag = "origin";
        trace.nodes.push_back(node);
        return trace;
    }

    Vector step = Vector::Zero(model.latent_dim());
    step[p] = delta;

    // One half per direction; the geodesic refinement keeps z0 and the far
    // endpoint fixed so the sweep stays anchored at the encoded shape.
    auto half_nodes = [&](double sign) {
        std::vector<Vector> zs;
        for (int i = 0; i <= n_steps; ++i) zs.push_back(z0 + sign * i * step);
        if (!model.is_linear() && n_steps >= 2) {
            GeodesicConfig gc = config;
            gc.segments = n_steps;
            auto [curve, report] = geodesic_path(model, zs.front(), zs.back(), gc);
            (void)report;
            for (int i = 0; i <= n_steps; ++i) zs[i] = curve.node(i);
        }
        return zs;
    };

    const std::vector<Vector> down = half_nodes(-1.0);
    const std::vector<Vector> up = half_nodes(1.0);

    std::vector<Vector> zs;
    for (int i = n_steps; i >= 1; --i) zs.push_back(down[i]);
    zs.push_back(z0);
    for (int i = 1; i <= n_steps; ++i) zs.push_back(up[i]);

    for (std::size_t i = 0; i < zs.size(); ++i) {
        TraceNode node = make_node(model, zs[i], graph);
        const int offset = static_cast<int>(i) - n_steps;
        node.tag = offset == 0 ? "origin"
                               : "dim" + std::to_string(p) + (offset < 0 ? "-" : "+");
        trace.nodes.push_back(node);
    }
    trace.arc_length_manifold = manifold_arc_length(model, curve_from_nodes(zs));
    return trace;
}

PlanResult plan_shape_path(const ShapeGraph& graph, const LatentModel& model,
                           const Vector& x_current_raw, const Vector& x_target_raw, int n_steps,
                           const GeodesicConfig& config) {
    if (n_steps < 1) throw std::invalid_argument("plan_shape_path: n_steps must be >= 1");
    const Vector z0 = model.encode(x_current_raw);
    const Vector zt = model.encode(x_target_raw);

    PlanResult result;
    if ((z0 - zt).norm() == 0.0) {
        for (auto* trace : {&result.shortest_path, &result.linear, &result.geodesic}) {
            trace->nodes.push_back(make_node(model, z0, &graph));
            trace->arc_length_manifold = 0.0;
        }
        result.shortest_path.provenance = "shortest-path";
        result.linear.provenance = "linear";
        result.geodesic.provenance = "geodesic";
        result.geodesic_report.converged = true;
        return result;
    }

    // Dataset-restricted route between the nearest graph attachments.
    const auto [path, cost] = graph.shortest_path(graph.nearest_node(z0), graph.nearest_node(zt));
    (void)cost;
    std::vector<Vector> sp_nodes{z0};
    for (int idx : path) sp_nodes.push_back(graph.nodes()[idx].z);
    sp_nodes.push_back(zt);
    result.shortest_path = trace_from_curve(model, curve_from_nodes(sp_nodes), "shortest-path",
                                            &graph);

    const LatentCurve linear_curve = linear_interpolation(z0, zt, n_steps);
    result.linear = trace_from_curve(model, linear_curve, "linear", &graph);

    if (model.is_linear()) {
        result.geodesic = result.linear;
        result.geodesic.provenance = "geodesic";
        result.geodesic_report.converged = true;
        result.geodesic_report.initial_energy = result.geodesic_report.final_energy =
            curve_energy(model, linear_curve);
    } else {
        GeodesicConfig gc = config;
        gc.segments = n_steps;
        auto [curve, report] = geodesic_path(model, z0, zt, gc);
        result.geodesic = trace_from_curve(model, curve, "geodesic", &graph);
        result.geodesic.energy_log = report.energy_log;
        result.geodesic_report = report;
    }
    return result;
}

std::vector<std::string> trace_labels(const DeformationTrace& trace, const ShapeGraph& graph) {
    if (trace.nodes.empty()) throw std::invalid_argument("trace_labels: empty trace");
    std::vector<std::string> itinerary;
    for (const auto& node : trace.nodes) {
        const std::string lbl = graph.knn_classify(node.z).label;
        if (itinerary.empty() || itinerary.back() != lbl) itinerary.push_back(lbl);
    }
    return itinerary;
}

}  // namespace softshape
