#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "fourier.hpp"
#include "generators.hpp"
#include "metrics.hpp"
#include "sampling.hpp"

using namespace softshape;

namespace {

// ---- independent quadrature oracle for the contour integrals ----
// Rebuilds the mirrored closed contour and integrates x(t) * trig(2 pi n t/T)
// with composite Gauss-Legendre, independent of the closed-form route.
struct ContourOracle {
    std::vector<Vec3> v;     // closed path vertices, v.back() == v.front()
    std::vector<double> t;   // cumulative chord parameter
    double T = 0.0;

    explicit ContourOracle(const MarkerShape& s) {
        v.assign(s.points.begin(), s.points.end());
        for (int i = static_cast<int>(s.points.size()) - 2; i >= 1; --i) v.push_back(s.points[i]);
        v.push_back(s.points.front());
        t.resize(v.size(), 0.0);
        for (std::size_t j = 1; j < v.size(); ++j) t[j] = t[j - 1] + (v[j] - v[j - 1]).norm();
        T = t.back();
    }

    // integrand: axis coordinate of the piecewise-linear contour
    double coord(double tt, int axis) const {
        const auto it = std::upper_bound(t.begin(), t.end(), tt);
        std::size_t j = std::min<std::size_t>(it - t.begin(), t.size() - 1);
        if (j == 0) j = 1;
        const double u = (tt - t[j - 1]) / (t[j] - t[j - 1]);
        return (1.0 - u) * v[j - 1][axis] + u * v[j][axis];
    }

    double integrate(int axis, int n, bool cosine) const {
        static const double gx[8] = {-0.9602898564975363, -0.7966664774136267,
                                     -0.5255324099163290, -0.1834346424956498,
                                     0.1834346424956498,  0.5255324099163290,
                                     0.7966664774136267,  0.9602898564975363};
        static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                     0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                     0.2223810344533745, 0.1012285362903763};
        const double w = 2.0 * M_PI / T;
        double total = 0.0;
        for (std::size_t j = 1; j < t.size(); ++j) {
            const int sub = 32;
            const double h = (t[j] - t[j - 1]) / sub;
            for (int s = 0; s < sub; ++s) {
                const double mid = t[j - 1] + (s + 0.5) * h;
                for (int g = 0; g < 8; ++g) {
                    const double tt = mid + 0.5 * h * gx[g];
                    const double trig = cosine ? std::cos(w * n * tt) : std::sin(w * n * tt);
                    total += 0.5 * h * gw[g] * coord(tt, axis) * trig;
                }
            }
        }
        return 2.0 / T * total;
    }

    double bias(int axis) const {
        double total = 0.0;
        for (std::size_t j = 1; j < t.size(); ++j)
            total += (t[j] - t[j - 1]) * 0.5 * (v[j - 1][axis] + v[j][axis]);
        return total / T;
    }
};

int smallest_n_reaching(const MarkerShape& shape, double target, int n_max) {
    for (int n = 1; n <= n_max; ++n)
        if (fourier_reconstruction_r2(shape, n) >= target) return n;
    return n_max + 1;
}

double min_pairwise_distance(const std::vector<Vec3>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::min(best, (pts[i] - pts[j]).norm());
    return best;
}

PointCloud random_cloud(int n, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-scale, scale);
    std::vector<Vec3> pts(n);
    for (auto& p : pts) p = Vec3(uni(rng), uni(rng), uni(rng));
    return PointCloud(std::move(pts));
}

}  // namespace

TEST_CASE("closed-form Fourier coefficients match dense quadrature") {
    const MarkerShape shapes[] = {
        generate_bar_shape(BarCategory::Line, {0.1, 0, 0, 0}, 8, 0),
        generate_bar_shape(BarCategory::ArchPos, {1.8, 0, 0, 0}, 8, 0),
        generate_bar_shape(BarCategory::SPos, {0.15, 0, 0, 0}, 8, 0),
        generate_bar_shape(BarCategory::HelixNeg, {2.0, 0.05, 0, 0}, 8, 0),
    };
    for (const auto& s : shapes) {
        const int N = 6;
        const FourierDescriptor desc = fit_fourier(s, N);
        const ContourOracle oracle(s);
        CHECK(desc.period == doctest::Approx(oracle.T).epsilon(1e-12));
        for (int axis = 0; axis < 3; ++axis)
            CHECK(desc.bias[axis] == doctest::Approx(oracle.bias(axis)).epsilon(1e-10));
        for (int n = 1; n <= N; ++n)
            for (int axis = 0; axis < 3; ++axis) {
                CHECK(desc.coefficients(n - 1, 2 * axis) ==
                      doctest::Approx(oracle.integrate(axis, n, true)).epsilon(1e-9));
                CHECK(desc.coefficients(n - 1, 2 * axis + 1) ==
                      doctest::Approx(oracle.integrate(axis, n, false)).epsilon(1e-9));
            }
    }
}

TEST_CASE("straight segment reconstructs with R2 >= 0.99 from N >= 8") {
    const MarkerShape line = generate_bar_shape(BarCategory::Line, {0.2, 0, 0, 0}, 8, 0);
    CHECK(fourier_reconstruction_r2(line, 8) >= 0.99);
    CHECK(fourier_reconstruction_r2(line, 12) >= 0.99);
}

TEST_CASE("closed circle contour is a single-harmonic curve") {
    const int q = 4096;
    const double R = 2.0;
    std::vector<Vec3> pts(q);
    for (int i = 0; i < q; ++i) {
        const double a = 2.0 * M_PI * i / q;
        pts[i] = Vec3(R * std::cos(a), R * std::sin(a), 0.0);
    }
    const MarkerShape circle(std::move(pts));
    const FourierDescriptor desc = fit_fourier(circle, 1, ContourClosure::Closed);
    for (std::size_t i = 0; i < desc.marker_params.size(); i += 97) {
        const Vec3 rec = eval_fourier(desc, desc.marker_params[i]);
        CHECK((rec - circle.points[i]).norm() < 1e-6 * R);
    }
}

TEST_CASE("eval of a bias-only descriptor is the bias everywhere") {
    FourierDescriptor desc;
    desc.n_harmonics = 3;
    desc.coefficients = Matrix::Zero(3, 6);
    desc.bias = Vec3(1, 2, 3);
    desc.period = 5.0;
    for (double l : {0.0, 0.7, 4.9, -3.0, 123.456})
        CHECK((eval_fourier(desc, l) - Vec3(1, 2, 3)).norm() == 0.0);
}

TEST_CASE("eval is periodic in L within 1e-9") {
    const MarkerShape s = generate_bar_shape(BarCategory::SNeg, {0.12, 0, 0, 0}, 8, 0);
    const FourierDescriptor desc = fit_fourier(s, 5);
    for (double l : {0.0, 0.3, 1.1, desc.period * 0.77})
        CHECK((eval_fourier(desc, l) - eval_fourier(desc, l + desc.period)).norm() < 1e-9);
    CHECK_THROWS_AS(eval_fourier(desc, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
}

TEST_CASE("reconstruction at marker params matches the stored fit residual") {
    const MarkerShape s = generate_bar_shape(BarCategory::ArchNeg, {2.2, 0, 0, 0}, 8, 0);
    const FourierDescriptor desc = fit_fourier(s, 4);
    const MarkerShape rec = reconstruct_markers(desc);
    double residual = 0.0;
    for (int i = 0; i < 8; ++i) residual = std::max(residual, (rec.points[i] - s.points[i]).norm());
    // evaluating again reproduces the same reconstruction exactly
    for (int i = 0; i < 8; ++i)
        CHECK((eval_fourier(desc, desc.marker_params[i]) - rec.points[i]).norm() == 0.0);
    CHECK(residual < 0.05);  // 4 harmonics already track a gentle arch
}

TEST_CASE("marker R2 is non-decreasing in the harmonic count") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<MarkerShape> shapes;
    for (int i = 0; i < 3; ++i) {
        shapes.push_back(generate_bar_shape(
            BarCategory::ArchPos, {0.8 + 1.6 * uni(rng), 0.1 * uni(rng), 0, 0}, 8, 0));
        shapes.push_back(generate_bar_shape(
            BarCategory::SPos, {0.18 + 0.12 * uni(rng), 0.1 * uni(rng), 0, 0}, 8, 0));
        shapes.push_back(generate_bar_shape(
            BarCategory::HelixPos, {1.3 + 1.0 * uni(rng), 0.035 + 0.02 * uni(rng), 0, 0}, 8, 0));
    }
    for (const auto& s : shapes) {
        double prev = -1e300;
        for (int n = 1; n <= 16; ++n) {
            const double r2 = fourier_reconstruction_r2(s, n);
            CHECK(r2 >= prev - 1e-9);
            prev = r2;
        }
    }
}

TEST_CASE("S shapes need more harmonics than arches for R2 >= 0.95") {
    const MarkerShape arch = generate_bar_shape(BarCategory::ArchPos, {1.6, 0, 0, 0}, 8, 0);
    const MarkerShape ess = generate_bar_shape(BarCategory::SPos, {0.25, 0, 0, 0}, 8, 0);
    const int n_arch = smallest_n_reaching(arch, 0.95, 10);
    const int n_s = smallest_n_reaching(ess, 0.95, 10);
    CHECK(n_s > n_arch);
}

TEST_CASE("max marker residual at N=16 is no worse than at N=4") {
    for (BarCategory cat : {BarCategory::Line, BarCategory::ArchPos, BarCategory::SNeg,
                            BarCategory::HelixPos}) {
        Dof dof{0, 0, 0, 0};
        if (cat == BarCategory::Line) dof = {0.1, 0, 0, 0};
        if (cat == BarCategory::ArchPos) dof = {1.9, 0, 0, 0};
        if (cat == BarCategory::SNeg) dof = {0.24, 0, 0, 0};
        if (cat == BarCategory::HelixPos) dof = {1.8, 0.05, 0, 0};
        const MarkerShape s = generate_bar_shape(cat, dof, 8, 0);
        auto max_residual = [&](int n) {
            const MarkerShape rec = reconstruct_markers(fit_fourier(s, n));
            double r = 0.0;
            for (int i = 0; i < 8; ++i) r = std::max(r, (rec.points[i] - s.points[i]).norm());
            return r;
        };
        CHECK(max_residual(16) <= max_residual(4) + 1e-12);
    }
}

TEST_CASE("fit_fourier rejects degenerate input and flags over-parameterization") {
    std::vector<Vec3> two{{0, 0, 0}, {1, 0, 0}};
    CHECK_THROWS_AS(fit_fourier(MarkerShape(two), 2), std::invalid_argument);

    std::vector<Vec3> dup{{0, 0, 0}, {0, 0, 0}, {1, 0, 0}};
    CHECK_THROWS_AS(fit_fourier(MarkerShape(dup), 2), std::invalid_argument);

    const MarkerShape s = generate_bar_shape(BarCategory::Line, {0, 0, 0, 0}, 4, 0);
    CHECK_FALSE(fit_fourier(s, 1).over_parameterized);  // 9 <= 12
    CHECK(fit_fourier(s, 2).over_parameterized);        // 15 > 12
    CHECK_THROWS_AS(fit_fourier(s, 0), std::invalid_argument);
}

TEST_CASE("descriptor flattening is 3 + 6N in documented order") {
    const MarkerShape s = generate_bar_shape(BarCategory::ArchPos, {1.5, 0, 0, 0}, 8, 0);
    const FourierDescriptor desc = fit_fourier(s, 3);
    const Vector flat = desc.flatten();
    REQUIRE(flat.size() == 3 + 6 * 3);
    CHECK(flat[0] == desc.bias.x());
    CHECK(flat[1] == desc.bias.y());
    CHECK(flat[2] == desc.bias.z());
    CHECK(flat[3] == desc.coefficients(0, 0));
    CHECK(flat[8] == desc.coefficients(0, 5));
    const FourierDescriptor back = FourierDescriptor::from_flat(flat, desc.period);
    CHECK((back.flatten() - flat).norm() == 0.0);
}

// ---- R^2 ----

TEST_CASE("r_squared basics") {
    Matrix y(3, 1), f(3, 1);
    y << 1, 2, 3;
    f << 1.1, 1.9, 3.2;
    CHECK(r_squared(y, y) == 1.0);
    CHECK(r_squared(y, f) == doctest::Approx(0.97).epsilon(1e-12));

    Matrix means(3, 1);
    means.setConstant(2.0);
    CHECK(r_squared(y, means) == doctest::Approx(0.0).epsilon(1e-15));

    Matrix constant(3, 1);
    constant.setConstant(5.0);
    CHECK_THROWS_AS(r_squared(constant, f), std::invalid_argument);
    Matrix wrong(2, 1);
    CHECK_THROWS_AS(r_squared(y, wrong), std::invalid_argument);
}

// ---- farthest point sampling ----

TEST_CASE("fps with n == cloud size returns a permutation") {
    const PointCloud cloud = random_cloud(20, 1);
    const PointCloud sampled = farthest_point_sample(cloud, 20);
    auto sorted_of = [](const PointCloud& c) {
        auto pts = c.points;
        std::sort(pts.begin(), pts.end(), [](const Vec3& a, const Vec3& b) {
            return std::lexicographical_compare(a.data(), a.data() + 3, b.data(), b.data() + 3);
        });
        return pts;
    };
    const auto a = sorted_of(cloud), b = sorted_of(sampled);
    for (int i = 0; i < 20; ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("fps picks the square corners (brute-force subset oracle)") {
    const std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.5, 0}};
    const PointCloud cloud(pts);
    const PointCloud sampled = farthest_point_sample(cloud, 4);

    // oracle: the 4-subset maximizing the minimum pairwise distance
    double best = -1.0;
    std::vector<Vec3> best_subset;
    for (int skip = 0; skip < 5; ++skip) {
        std::vector<Vec3> subset;
        for (int i = 0; i < 5; ++i)
            if (i != skip) subset.push_back(pts[i]);
        const double d = min_pairwise_distance(subset);
        if (d > best) {
            best = d;
            best_subset = subset;
        }
    }
    REQUIRE(best_subset.size() == 4);
    for (const auto& p : sampled.points)
        CHECK(std::find(best_subset.begin(), best_subset.end(), p) != best_subset.end());
    // seed point is the lexicographic minimum
    CHECK(sampled.points[0] == Vec3(0, 0, 0));
}

TEST_CASE("fps beats random subsets on minimum pairwise distance") {
    const PointCloud cloud = random_cloud(1000, 3);
    const PointCloud sampled = farthest_point_sample(cloud, 512);
    const double fps_min = min_pairwise_distance(sampled.points);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> idx(1000);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        std::vector<Vec3> subset(512);
        for (int i = 0; i < 512; ++i) subset[i] = cloud.points[idx[i]];
        CHECK(fps_min >= min_pairwise_distance(subset));
    }
}

TEST_CASE("fps is deterministic and set-idempotent") {
    const PointCloud cloud = random_cloud(300, 9);
    const PointCloud a = farthest_point_sample(cloud, 64);
    const PointCloud b = farthest_point_sample(cloud, 64);
    for (int i = 0; i < 64; ++i) CHECK(a.points[i] == b.points[i]);
    const PointCloud again = farthest_point_sample(a, 64);
    auto key = [](const Vec3& p) { return std::make_tuple(p.x(), p.y(), p.z()); };
    std::set<std::tuple<double, double, double>> sa, sb;
    for (const auto& p : a.points) sa.insert(key(p));
    for (const auto& p : again.points) sb.insert(key(p));
    CHECK(sa == sb);
    CHECK_THROWS_AS(farthest_point_sample(cloud, 301), std::invalid_argument);
}

// ---- chamfer distance ----

TEST_CASE("chamfer basics") {
    const PointCloud a = random_cloud(30, 5);
    CHECK(chamfer_distance(a, a) == 0.0);

    const PointCloud p({Vec3(0, 0, 0)});
    const PointCloud q({Vec3(1, 0, 0)});
    CHECK(chamfer_distance(p, q) == doctest::Approx(2.0).epsilon(1e-15));  // both directions

    const PointCloud empty{};
    CHECK_THROWS_AS(chamfer_distance(a, empty), std::invalid_argument);
}

TEST_CASE("chamfer equals the O(n^2) double-loop oracle") {
    for (int trial = 0; trial < 10; ++trial) {
        const PointCloud a = random_cloud(50, 100 + trial);
        const PointCloud b = random_cloud(47, 200 + trial);
        double oracle = 0.0;
        for (const auto& x : a.points) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& y : b.points) best = std::min(best, (x - y).squaredNorm());
            oracle += best;
        }
        for (const auto& y : b.points) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& x : a.points) best = std::min(best, (x - y).squaredNorm());
            oracle += best;
        }
        CHECK(chamfer_distance(a, b) == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(chamfer_distance_grid(a, b) == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(chamfer_distance(a, b) == chamfer_distance(b, a));
    }
}

TEST_CASE("grid and brute chamfer agree exactly at and above the switch size") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const PointCloud a = random_cloud(400, seed);
        const PointCloud b = random_cloud(300, seed + 50);
        CHECK(chamfer_distance_grid(a, b) == chamfer_distance_bruteforce(a, b));
    }
    // clustered data stresses the shell search
    PointCloud c = random_cloud(300, 7, 0.01);
    c.points.push_back(Vec3(100, 100, 100));
    const PointCloud d = random_cloud(300, 8, 50.0);
    CHECK(chamfer_distance_grid(c, d) == chamfer_distance_bruteforce(c, d));
}

TEST_CASE("chamfer is zero iff the point sets are equal as sets") {
    PointCloud a = random_cloud(40, 11);
    PointCloud b = a;
    std::reverse(b.points.begin(), b.points.end());
    CHECK(chamfer_distance(a, b) == 0.0);
    b.points[0] += Vec3(1e-3, 0, 0);
    CHECK(chamfer_distance(a, b) > 0.0);
}

TEST_CASE("batch chamfer matches single evaluations under a thread cap") {
    setenv("SOFTSHAPE_THREADS", "4", 1);
    std::vector<PointCloud> as, bs;
    for (int i = 0; i < 12; ++i) {
        as.push_back(random_cloud(80, 300 + i));
        bs.push_back(random_cloud(90, 400 + i));
    }
    std::vector<const PointCloud*> pa, pb;
    for (int i = 0; i < 12; ++i) {
        pa.push_back(&as[i]);
        pb.push_back(&bs[i]);
    }
    const std::vector<double> batch = chamfer_distance_batch(pa, pb);
    for (int i = 0; i < 12; ++i) CHECK(batch[i] == chamfer_distance(as[i], bs[i]));
    unsetenv("SOFTSHAPE_THREADS");
}
