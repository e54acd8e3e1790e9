#include "generators.hpp"

#include <cmath>
#include <functional>
#include <random>

#include "sampling.hpp"

namespace softshape {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 rot_z(const Vec3& p, double b) {
    const double c = std::cos(b), s = std::sin(b);
    return {c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z()};
}

// Peak of |u(1-u)(1-2u)| on [0,1], at u = 1/2 - 1/(2*sqrt(3)).
const double kCubicPeak = []() {
    const double u = 0.5 - 0.5 / std::sqrt(3.0);
    return u * (1.0 - u) * (1.0 - 2.0 * u);
}();

// Planar cubic with an inflection at u = 1/2; peak |y| equals amp.
Vec3 cubic_s_point(double u, double amp) {
    const double y = amp * u * (1.0 - u) * (1.0 - 2.0 * u) / kCubicPeak;
    return {u, y, 0.0};
}

double cubic_s_speed(double u, double amp) {
    const double dy = amp * (1.0 - 6.0 * u + 6.0 * u * u) / kCubicPeak;
    return std::sqrt(1.0 + dy * dy);
}

// Cumulative arc length of the cubic via composite Gauss-Legendre (5-point).
double cubic_s_arclen(double u, double amp) {
    static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};
    const int n_seg = 64;
    double total = 0.0;
    const double h = u / n_seg;
    for (int s = 0; s < n_seg; ++s) {
        const double mid = (s + 0.5) * h;
        for (int g = 0; g < 5; ++g)
            total += 0.5 * h * gw[g] * cubic_s_speed(mid + 0.5 * h * gx[g], amp);
    }
    return total;
}

// Inverts s(u) = target by bisection; s is strictly increasing.
double cubic_s_invert(double target, double amp) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cubic_s_arclen(mid, amp) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

BarCategory parse_bar_category(const std::string& name) {
    if (name == "line") return BarCategory::Line;
    if (name == "arch+") return BarCategory::ArchPos;
    if (name == "arch-") return BarCategory::ArchNeg;
    if (name == "s+") return BarCategory::SPos;
    if (name == "s-") return BarCategory::SNeg;
    if (name == "helix+") return BarCategory::HelixPos;
    if (name == "helix-") return BarCategory::HelixNeg;
    throw std::invalid_argument("unknown bar category: " + name);
}

std::string to_string(BarCategory c) {
    switch (c) {
        case BarCategory::Line: return "line";
        case BarCategory::ArchPos: return "arch+";
        case BarCategory::ArchNeg: return "arch-";
        case BarCategory::SPos: return "s+";
        case BarCategory::SNeg: return "s-";
        case BarCategory::HelixPos: return "helix+";
        case BarCategory::HelixNeg: return "helix-";
    }
    throw std::logic_error("bad bar category");
}

SheetCategory parse_sheet_category(const std::string& name) {
    if (name == "plane") return SheetCategory::Plane;
    if (name == "bend1+") return SheetCategory::Bend1Pos;
    if (name == "bend1-") return SheetCategory::Bend1Neg;
    if (name == "bend2+") return SheetCategory::Bend2Pos;
    if (name == "bend2-") return SheetCategory::Bend2Neg;
    if (name == "fold1+") return SheetCategory::Fold1Pos;
    if (name == "fold1-") return SheetCategory::Fold1Neg;
    if (name == "fold2+") return SheetCategory::Fold2Pos;
    if (name == "fold2-") return SheetCategory::Fold2Neg;
    throw std::invalid_argument("unknown sheet category: " + name);
}

std::string to_string(SheetCategory c) {
    switch (c) {
        case SheetCategory::Plane: return "plane";
        case SheetCategory::Bend1Pos: return "bend1+";
        case SheetCategory::Bend1Neg: return "bend1-";
        case SheetCategory::Bend2Pos: return "bend2+";
        case SheetCategory::Bend2Neg: return "bend2-";
        case SheetCategory::Fold1Pos: return "fold1+";
        case SheetCategory::Fold1Neg: return "fold1-";
        case SheetCategory::Fold2Pos: return "fold2+";
        case SheetCategory::Fold2Neg: return "fold2-";
    }
    throw std::logic_error("bad sheet category");
}

MarkerShape generate_bar_shape(BarCategory category, const Dof& dof, int q, std::uint64_t seed) {
    (void)seed;
    if (q < 2) throw std::invalid_argument("generate_bar_shape: q must be >= 2");

    std::vector<Vec3> pts(q);
    const double ds = 1.0 / (q - 1);

    switch (category) {
        case BarCategory::Line: {
            const double b = dof[0];
            for (int i = 0; i < q; ++i) pts[i] = rot_z({i * ds, 0.0, 0.0}, b);
            break;
        }
        case BarCategory::ArchPos:
        case BarCategory::ArchNeg: {
            const double kappa = dof[0];
            if (!(kappa > 0.0)) throw std::invalid_argument("arch: curvature dof must be > 0");
            const double b = dof[1];
            const double sign = category == BarCategory::ArchPos ? 1.0 : -1.0;
            for (int i = 0; i < q; ++i) {
                const double s = i * ds;
                Vec3 p{std::sin(kappa * s) / kappa, sign * (1.0 - std::cos(kappa * s)) / kappa,
                       0.0};
                pts[i] = rot_z(p, b);
            }
            break;
        }
        case BarCategory::SPos:
        case BarCategory::SNeg: {
            const double amp = dof[0];
            if (!(amp > 0.0)) throw std::invalid_argument("s: amplitude dof must be > 0");
            const double b = dof[1];
            const double sign = category == BarCategory::SPos ? 1.0 : -1.0;
            const double total = cubic_s_arclen(1.0, amp);
            for (int i = 0; i < q; ++i) {
                const double u = (i == 0) ? 0.0
                                 : (i == q - 1)
                                     ? 1.0
                                     : cubic_s_invert(i * ds * total, amp);
                Vec3 p = cubic_s_point(u, amp) / total;  // rescale to unit length
                p.y() *= sign;
                pts[i] = rot_z(p, b);
            }
            break;
        }
        case BarCategory::HelixPos:
        case BarCategory::HelixNeg: {
            const double turns = dof[0];
            const double radius = dof[1];
            if (!(turns > 0.0) || !(radius > 0.0))
                throw std::invalid_argument("helix: turns and radius dofs must be > 0");
            const double wr = 2.0 * kPi * turns * radius;
            if (wr >= 1.0)
                throw std::invalid_argument("helix: 2*pi*turns*radius must be < 1 (unit length)");
            const double pitch = std::sqrt(1.0 - wr * wr);
            const double sign = category == BarCategory::HelixPos ? 1.0 : -1.0;
            for (int i = 0; i < q; ++i) {
                const double s = i * ds;
                const double a = 2.0 * kPi * turns * s;
                pts[i] = {radius * std::cos(a) - radius, sign * radius * std::sin(a), pitch * s};
            }
            break;
        }
    }
    return MarkerShape(std::move(pts), to_string(category));
}

PointCloud generate_sheet_cloud(SheetCategory category, const Dof& dof, int n_raw,
                                std::uint64_t seed) {
    if (n_raw < 64) throw std::invalid_argument("generate_sheet_cloud: n_raw must be >= 64");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    std::vector<Vec3> pts(n_raw);
    for (int i = 0; i < n_raw; ++i) {
        const double x = uni(rng) - 0.5;
        const double y = uni(rng) - 0.5;
        switch (category) {
            case SheetCategory::Plane:
                pts[i] = {x, y, 0.0};
                break;
            case SheetCategory::Bend1Pos:
            case SheetCategory::Bend1Neg: {
                const double kappa = dof[0];
                if (!(kappa > 0.0)) throw std::invalid_argument("bend: curvature dof must be > 0");
                const double sign = category == SheetCategory::Bend1Pos ? 1.0 : -1.0;
                pts[i] = {std::sin(kappa * x) / kappa, y,
                          sign * (1.0 - std::cos(kappa * x)) / kappa};
                break;
            }
            case SheetCategory::Bend2Pos:
            case SheetCategory::Bend2Neg: {
                const double kappa = dof[0];
                if (!(kappa > 0.0)) throw std::invalid_argument("bend: curvature dof must be > 0");
                const double sign = category == SheetCategory::Bend2Pos ? 1.0 : -1.0;
                pts[i] = {x, std::sin(kappa * y) / kappa,
                          sign * (1.0 - std::cos(kappa * y)) / kappa};
                break;
            }
            case SheetCategory::Fold1Pos:
            case SheetCategory::Fold1Neg: {
                const double theta = dof[0];
                if (!(theta > 0.0)) throw std::invalid_argument("fold: angle dof must be > 0");
                const double sign = category == SheetCategory::Fold1Pos ? 1.0 : -1.0;
                pts[i] = x < 0.0 ? Vec3{x, y, 0.0}
                                 : Vec3{x * std::cos(theta), y, sign * x * std::sin(theta)};
                break;
            }
            case SheetCategory::Fold2Pos:
            case SheetCategory::Fold2Neg: {
                const double theta = dof[0];
                if (!(theta > 0.0)) throw std::invalid_argument("fold: angle dof must be > 0");
                const double sign = category == SheetCategory::Fold2Pos ? 1.0 : -1.0;
                pts[i] = y < 0.0 ? Vec3{x, y, 0.0}
                                 : Vec3{x, y * std::cos(theta), sign * y * std::sin(theta)};
                break;
            }
        }
    }
    return PointCloud(std::move(pts), to_string(category));
}

DofRange bar_primary_dof_range(BarCategory c) {
    switch (c) {
        // Ranges run from gentle to strong deformation so the encoded
        // classes form a connected continuum (the captured data they stand
        // in for is a deformation recording, not isolated islands).
        case BarCategory::Line: return {-0.25, 0.25};      // z rotation
        case BarCategory::ArchPos:
        case BarCategory::ArchNeg: return {0.25, 2.4};     // curvature
        case BarCategory::SPos:
        case BarCategory::SNeg: return {0.10, 0.30};       // amplitude
        case BarCategory::HelixPos:
        case BarCategory::HelixNeg: return {1.6, 2.3};     // turns
    }
    throw std::logic_error("bad bar category");
}

ShapeDataset generate_bar_dataset(int per_class, int q, std::uint64_t seed) {
    if (per_class < 1) throw std::invalid_argument("generate_bar_dataset: per_class must be >= 1");
    static const BarCategory cats[] = {BarCategory::Line,    BarCategory::ArchPos,
                                       BarCategory::ArchNeg, BarCategory::SPos,
                                       BarCategory::SNeg,    BarCategory::HelixPos,
                                       BarCategory::HelixNeg};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto draw = [&](DofRange r) { return r.lo + (r.hi - r.lo) * uni(rng); };

    ShapeDataset ds;
    ds.kind = DatasetKind::Markers;
    for (BarCategory c : cats) {
        const DofRange primary = bar_primary_dof_range(c);
        for (int i = 0; i < per_class; ++i) {
            Dof dof{0.0, 0.0, 0.0, 0.0};
            switch (c) {
                case BarCategory::Line:
                    dof[0] = draw(primary);
                    break;
                case BarCategory::ArchPos:
                case BarCategory::ArchNeg:
                case BarCategory::SPos:
                case BarCategory::SNeg:
                    dof[0] = draw(primary);
                    dof[1] = draw({-0.15, 0.15});
                    break;
                case BarCategory::HelixPos:
                case BarCategory::HelixNeg:
                    dof[0] = draw(primary);
                    dof[1] = draw({0.055, 0.065});
                    break;
            }
            ds.markers.push_back(generate_bar_shape(c, dof, q, 0));
        }
    }
    return ds;
}

ShapeDataset generate_sheet_dataset(int per_class, int n_raw, std::uint64_t seed,
                                    int resample_to) {
    if (per_class < 1)
        throw std::invalid_argument("generate_sheet_dataset: per_class must be >= 1");
    static const SheetCategory cats[] = {
        SheetCategory::Plane,    SheetCategory::Bend1Pos, SheetCategory::Bend1Neg,
        SheetCategory::Bend2Pos, SheetCategory::Bend2Neg, SheetCategory::Fold1Pos,
        SheetCategory::Fold1Neg, SheetCategory::Fold2Pos, SheetCategory::Fold2Neg};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    ShapeDataset ds;
    ds.kind = DatasetKind::Cloud;
    for (SheetCategory c : cats) {
        for (int i = 0; i < per_class; ++i) {
            Dof dof{0.0, 0.0, 0.0, 0.0};
            if (c == SheetCategory::Fold1Pos || c == SheetCategory::Fold1Neg ||
                c == SheetCategory::Fold2Pos || c == SheetCategory::Fold2Neg)
                dof[0] = 0.4 + 0.8 * uni(rng);   // fold angle [0.4, 1.2] rad
            else if (c != SheetCategory::Plane)
                dof[0] = 0.8 + 2.0 * uni(rng);   // bend curvature [0.8, 2.8]
            const std::uint64_t cloud_seed = rng();
            PointCloud cloud = generate_sheet_cloud(c, dof, n_raw, cloud_seed);
            if (resample_to > 0) cloud = farthest_point_sample(cloud, resample_to);
            ds.clouds.push_back(std::move(cloud));
        }
    }
    return ds;
}

std::vector<double> chord_lengths(const MarkerShape& s) {
    std::vector<double> out(s.points.size() - 1);
    for (std::size_t i = 0; i + 1 < s.points.size(); ++i)
        out[i] = (s.points[i + 1] - s.points[i]).norm();
    return out;
}

}  // namespace softshape
