#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fourier.hpp"

namespace softshape {

namespace {

std::vector<Vec3> shape_points(const Vector& features, const FeatureSpace& space) {
    switch (space.kind) {
        case FeatureSpace::Kind::MarkerRaw:
        case FeatureSpace::Kind::CloudRaw: {
            std::vector<Vec3> pts(features.size() / 3);
            for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = features.segment<3>(3 * i);
            return pts;
        }
        case FeatureSpace::Kind::Fourier: {
            FourierDescriptor desc = FourierDescriptor::from_flat(features);
            desc.closure = ContourClosure::Mirror;
            return sample_fourier_curve(desc, 64);
        }
    }
    throw std::logic_error("bad feature space");
}

std::string esc(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

}  // namespace

void render_trace_svg(const DeformationTrace& trace, const FeatureSpace& space,
                      const std::string& path) {
    if (trace.nodes.empty()) throw std::invalid_argument("render_trace_svg: empty trace");

    std::vector<std::vector<Vec3>> panels;
    panels.reserve(trace.nodes.size());
    for (const auto& n : trace.nodes) panels.push_back(shape_points(n.shape, space));

    // Projection axes: the two coordinates with the largest pooled variance.
    Vec3 sum = Vec3::Zero(), sumsq = Vec3::Zero();
    std::size_t count = 0;
    for (const auto& pts : panels)
        for (const auto& p : pts) {
            sum += p;
            sumsq += p.cwiseProduct(p);
            ++count;
        }
    const Vec3 var = sumsq / double(count) - (sum / double(count)).cwiseProduct(sum / double(count));
    int ax = 0, ay = 1;
    {
        std::array<int, 3> order{0, 1, 2};
        std::sort(order.begin(), order.end(), [&](int a, int b) { return var[a] > var[b]; });
        ax = std::min(order[0], order[1]);
        ay = std::max(order[0], order[1]);
    }

    double lo_x = 1e300, hi_x = -1e300, lo_y = 1e300, hi_y = -1e300;
    for (const auto& pts : panels)
        for (const auto& p : pts) {
            lo_x = std::min(lo_x, p[ax]);
            hi_x = std::max(hi_x, p[ax]);
            lo_y = std::min(lo_y, p[ay]);
            hi_y = std::max(hi_y, p[ay]);
        }
    if (hi_x - lo_x < 1e-9) hi_x = lo_x + 1e-9;
    if (hi_y - lo_y < 1e-9) hi_y = lo_y + 1e-9;

    const int per_row = 8;
    const double panel = 140.0, pad = 12.0, caption = 16.0;
    const int n_panels = static_cast<int>(panels.size());
    const int rows = (n_panels + per_row - 1) / per_row;
    const double width = pad + std::min(per_row, n_panels) * (panel + pad);
    const double height = pad + rows * (panel + caption + pad) + 20.0;

    const double scale = (panel - 20.0) / std::max(hi_x - lo_x, hi_y - lo_y);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
        << "\" font-family=\"monospace\" font-size=\"10\">\n";
    out << "<text x=\"" << pad << "\" y=\"14\">" << esc(trace.provenance)
        << " | nodes=" << n_panels << " | arc=" << trace.arc_length_manifold << "</text>\n";

    const bool ordered = space.ordered();
    for (int i = 0; i < n_panels; ++i) {
        const double ox = pad + (i % per_row) * (panel + pad);
        const double oy = 20.0 + pad + (i / per_row) * (panel + caption + pad);
        out << "<rect x=\"" << ox << "\" y=\"" << oy << "\" width=\"" << panel << "\" height=\""
            << panel << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
        auto map_x = [&](double v) { return ox + 10.0 + (v - lo_x) * scale; };
        auto map_y = [&](double v) { return oy + panel - 10.0 - (v - lo_y) * scale; };
        if (ordered) {
            out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
            for (const auto& p : panels[i]) out << map_x(p[ax]) << "," << map_y(p[ay]) << " ";
            out << "\"/>\n";
        }
        for (const auto& p : panels[i])
            out << "<circle cx=\"" << map_x(p[ax]) << "\" cy=\"" << map_y(p[ay])
                << "\" r=\"" << (ordered ? 2.0 : 0.8) << "\" fill=\"#d62728\"/>\n";
        std::string cap = std::to_string(i);
        if (trace.nodes[i].predicted_label) cap += " " + *trace.nodes[i].predicted_label;
        if (!trace.nodes[i].tag.empty()) cap += " [" + trace.nodes[i].tag + "]";
        out << "<text x=\"" << ox << "\" y=\"" << oy + panel + 12.0 << "\">" << esc(cap)
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace softshape
