#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "nn_train.hpp"
#include "pca.hpp"
#include "pipeline.hpp"
#include "planner.hpp"

using namespace softshape;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

std::vector<std::optional<std::string>> labels_of(std::initializer_list<const char*> names) {
    std::vector<std::optional<std::string>> out;
    for (const char* n : names) out.emplace_back(n);
    return out;
}

// Exhaustive shortest path over all simple paths (oracle for Dijkstra).
double brute_force_shortest(const ShapeGraph& graph, int src, int dst) {
    const int n = graph.size();
    std::vector<std::vector<double>> w(n, std::vector<double>(n, -1.0));
    for (const auto& [a, b, weight] : graph.edges()) {
        w[a][b] = weight;
        w[b][a] = weight;
    }
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> visited(n, 0);
    std::function<void(int, double)> dfs = [&](int v, double cost) {
        if (cost >= best) return;
        if (v == dst) {
            best = cost;
            return;
        }
        visited[v] = 1;
        for (int u = 0; u < n; ++u)
            if (w[v][u] >= 0.0 && !visited[u]) dfs(u, cost + w[v][u]);
        visited[v] = 0;
    };
    dfs(src, 0.0);
    return best;
}

Autoencoder trained_bar_model(int per_class = 25, int epochs = 400, std::uint64_t seed = 3) {
    Autoencoder model = build_marker_preset(seed);
    const ShapeDataset ds = generate_bar_dataset(per_class, 8, seed);
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.seed = seed;
    train_on_dataset(model, ds, cfg);
    return model;
}

}  // namespace

TEST_CASE("knn classification: hand-enumerated 1D two-class example") {
    const Matrix latents = from_rows({{-2.0}, {-1.0}, {1.0}, {2.0}});
    const auto labels = labels_of({"A", "A", "B", "B"});
    ShapeGraph graph = ShapeGraph::build(latents, labels, 1);

    // z = 0.1, k = 3: neighbors at -1 (A), 1 (B), 2 (B) -> B
    const auto result = graph.knn_classify((Vector(1) << 0.1).finished(), 3);
    CHECK(result.label == "B");
    CHECK(result.votes.at("B") == 2);
    CHECK(result.votes.at("A") == 1);

    // exact node hit with a unique nearest neighborhood
    CHECK(graph.knn_classify((Vector(1) << -2.0).finished(), 1).label == "A");

    // k = 2 tie: one vote each, the nearer neighbor (B at 1) wins
    CHECK(graph.knn_classify((Vector(1) << 0.1).finished(), 2).label == "B");
    // mirrored query: nearer neighbor is A
    CHECK(graph.knn_classify((Vector(1) << -0.1).finished(), 2).label == "A");

    CHECK_THROWS_AS(graph.knn_classify((Vector(1) << 0.0).finished(), 5),
                    std::invalid_argument);
}

TEST_CASE("knn classification is invariant under node permutation") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    Matrix latents(30, 3);
    for (int i = 0; i < 30; ++i)
        for (int c = 0; c < 3; ++c) latents(i, c) = normal(rng);
    std::vector<std::optional<std::string>> labels(30);
    for (int i = 0; i < 30; ++i) labels[i] = (i % 3 == 0) ? "x" : (i % 3 == 1 ? "y" : "z");

    const ShapeGraph graph = ShapeGraph::build(latents, labels, 4);

    std::vector<int> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix latents_p(30, 3);
    std::vector<std::optional<std::string>> labels_p(30);
    for (int i = 0; i < 30; ++i) {
        latents_p.row(i) = latents.row(perm[i]);
        labels_p[i] = labels[perm[i]];
    }
    const ShapeGraph permuted = ShapeGraph::build(latents_p, labels_p, 4);

    for (int trial = 0; trial < 50; ++trial) {
        Vector z(3);
        for (int c = 0; c < 3; ++c) z[c] = normal(rng);
        CHECK(graph.knn_classify(z, 5).label == permuted.knn_classify(z, 5).label);
    }
}

TEST_CASE("graph structure: symmetric edges, positive weights, degree >= k_g") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> normal;
    Matrix latents(20, 2);
    for (int i = 0; i < 20; ++i)
        for (int c = 0; c < 2; ++c) latents(i, c) = normal(rng);
    std::vector<std::optional<std::string>> labels(20);
    const ShapeGraph graph = ShapeGraph::build(latents, labels, 3);

    std::vector<int> degree(20, 0);
    for (const auto& [a, b, w] : graph.edges()) {
        CHECK(w > 0.0);
        CHECK(a < b);  // stored undirected, one record per pair
        ++degree[a];
        ++degree[b];
    }
    for (int d : degree) CHECK(d >= 3);
}

TEST_CASE("dijkstra on a hand chain and against brute force") {
    const Matrix latents = from_rows({{0.0}, {1.0}, {2.0}});
    const auto labels = labels_of({"a", "b", "c"});
    const ShapeGraph chain = ShapeGraph::build(latents, labels, 1);
    const auto [path, cost] = chain.shortest_path(0, 2);
    REQUIRE(path.size() == 3);
    CHECK(path[0] == 0);
    CHECK(path[1] == 1);
    CHECK(path[2] == 2);
    CHECK(cost == doctest::Approx(2.0));

    // 50 random graphs with <= 10 nodes: exhaustive simple-path oracle
    std::mt19937_64 rng(31);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 4 + static_cast<int>(rng() % 7);
        Matrix z(n, 2);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < 2; ++c) z(i, c) = normal(rng);
        std::vector<std::optional<std::string>> lbl(n);
        const int kg = 1 + static_cast<int>(rng() % std::min(3, n - 1));
        const ShapeGraph graph = ShapeGraph::build(z, lbl, kg);
        const int src = static_cast<int>(rng() % n);
        const int dst = static_cast<int>(rng() % n);
        double expected = brute_force_shortest(graph, src, dst);
        try {
            const auto [p, c] = graph.shortest_path(src, dst);
            CHECK(c == doctest::Approx(expected).epsilon(1e-12));
        } catch (const std::runtime_error&) {
            CHECK(std::isinf(expected));  // disconnected in the oracle too
        }
    }
}

TEST_CASE("disconnected queries report the components") {
    std::vector<ShapeGraph::Node> nodes;
    for (int i = 0; i < 4; ++i)
        nodes.push_back({(Vector(1) << double(i)).finished(), std::nullopt, i});
    // two islands: {0,1} and {2,3}
    const ShapeGraph graph = ShapeGraph::from_parts(
        std::move(nodes), {{0, 1, 1.0}, {2, 3, 1.0}}, 1, 1);
    try {
        graph.shortest_path(0, 3);
        FAIL("expected disconnection error");
    } catch (const std::runtime_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("disconnected") != std::string::npos);
        CHECK(msg.find("components") != std::string::npos);
        CHECK(msg.find("2 nodes") != std::string::npos);
    }
}

TEST_CASE("select_k_cv: separated clusters give zero error and the smallest k") {
    Matrix latents(20, 2);
    std::vector<std::optional<std::string>> labels(20);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> jitter(-0.1, 0.1);
    for (int i = 0; i < 20; ++i) {
        const bool left = i < 10;
        latents(i, 0) = (left ? -5.0 : 5.0) + jitter(rng);
        latents(i, 1) = jitter(rng);
        labels[i] = left ? "L" : "R";
    }
    const CvResult cv = select_k_cv(latents, labels, {1, 3, 5, 7}, 5, 0);
    for (double e : cv.mean_error) CHECK(e == 0.0);
    CHECK(cv.best_k == 1);  // ties resolve toward the smaller k

    const CvResult again = select_k_cv(latents, labels, {1, 3, 5, 7}, 5, 0);
    CHECK(again.best_k == cv.best_k);
    for (std::size_t i = 0; i < cv.mean_error.size(); ++i)
        CHECK(again.mean_error[i] == cv.mean_error[i]);

    // class with fewer samples than folds: 2 L's and 3 R's against 5 folds
    const Matrix small = latents.middleRows(8, 5);
    const std::vector<std::optional<std::string>> small_labels(labels.begin() + 8,
                                                               labels.begin() + 13);
    CHECK_THROWS_AS(select_k_cv(small, small_labels, {1}, 5, 0), std::invalid_argument);
}

TEST_CASE("select_k_cv on an encoded bar dataset is deterministic with a finite curve") {
    const Autoencoder model = trained_bar_model(10, 150, 11);
    const ShapeDataset ds = generate_bar_dataset(10, 8, 11);
    const Matrix Z = encode_dataset(model, ds);
    std::vector<std::optional<std::string>> labels(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) labels[i] = ds.label_of(i);
    const std::vector<int> ks{1, 3, 5, 7, 9};
    const CvResult a = select_k_cv(Z, labels, ks, 5, 4);
    const CvResult b = select_k_cv(Z, labels, ks, 5, 4);
    for (std::size_t i = 0; i < ks.size(); ++i) {
        CHECK(a.mean_error[i] == b.mean_error[i]);
        CHECK(a.mean_error[i] >= 0.0);
        CHECK(a.mean_error[i] <= 1.0);
    }
    CHECK(a.best_k == b.best_k);
    MESSAGE("cv error curve: ", a.mean_error[0], " ", a.mean_error[1], " ", a.mean_error[2], " ",
            a.mean_error[3], " ", a.mean_error[4], " -> best k=", a.best_k);
}

TEST_CASE("feature sweep with zero steps is just the reconstruction of z0") {
    const ShapeDataset ds = generate_bar_dataset(5, 8, 2);
    const PcaModel model = fit_pca_dataset(ds, 4, false, 0);
    const GeodesicConfig gc;
    const DeformationTrace trace =
        semantic_feature_sweep(model, ds.markers[0].flatten(), 0, 0.1, 0, gc);
    REQUIRE(trace.nodes.size() == 1);
    CHECK(trace.nodes[0].tag == "origin");
    const Vector z0 = model.encode(ds.markers[0].flatten());
    CHECK((trace.nodes[0].shape - model.reconstruct(z0)).norm() == 0.0);
    CHECK(trace.provenance == "feature-sweep");
}

TEST_CASE("pca feature sweep follows the exact linear ray") {
    const ShapeDataset ds = generate_bar_dataset(5, 8, 2);
    PcaModel model = fit_pca_dataset(ds, 4, false, 0);
    const Vector x0 = ds.markers[3].flatten();
    const Vector z0 = model.encode(x0);
    const int p = 2;
    const double delta = 0.05;
    const GeodesicConfig gc;
    const DeformationTrace trace = semantic_feature_sweep(model, x0, p, delta, 4, gc);
    REQUIRE(trace.nodes.size() == 9);  // 4 down + origin + 4 up
    const Vector ray = model.components().row(p).transpose();  // row p of P = column p of P^T
    for (int i = 0; i < 9; ++i) {
        const int offset = i - 4;
        const Vector expected = model.reconstruct(z0) + offset * delta * ray;
        CHECK((trace.nodes[i].shape - expected).cwiseAbs().maxCoeff() < 1e-10);
        const std::string want_tag =
            offset == 0 ? "origin" : (offset < 0 ? "dim2-" : "dim2+");
        CHECK(trace.nodes[i].tag == want_tag);
    }
    // invalid dimension
    CHECK_THROWS_AS(semantic_feature_sweep(model, x0, 7, delta, 2, gc), std::invalid_argument);
    CHECK_THROWS_AS(semantic_feature_sweep(model, x0, 0, 0.0, 2, gc), std::invalid_argument);
}

TEST_CASE("autoencoder feature sweep moves smoothly (empirical Lipschitz bound)") {
    const Autoencoder model = trained_bar_model(15, 300, 7);
    const ShapeDataset ds = generate_bar_dataset(15, 8, 7);
    const Vector x0 = ds.markers[0].flatten();
    GeodesicConfig gc;
    gc.max_iterations = 2000;
    for (int p = 0; p < 4; ++p) {
        const DeformationTrace trace = semantic_feature_sweep(model, x0, p, 0.05, 5, gc);
        REQUIRE(trace.nodes.size() == 11);
        // empirical Lipschitz constant: largest jacobian spectral norm along the trace
        double lip = 0.0;
        for (const auto& node : trace.nodes) {
            Eigen::JacobiSVD<Matrix> svd(model.decoder_jacobian(node.z));
            lip = std::max(lip, svd.singularValues()[0]);
        }
        for (std::size_t i = 0; i + 1 < trace.nodes.size(); ++i) {
            const double dz = (trace.nodes[i + 1].z - trace.nodes[i].z).norm();
            const double dshape = (model.decode(trace.nodes[i + 1].z) -
                                   model.decode(trace.nodes[i].z)).norm();
            CHECK(dshape <= 1.2 * lip * dz + 1e-12);
        }
    }
}

TEST_CASE("plan between identical shapes degenerates to a single node") {
    const ShapeDataset ds = generate_bar_dataset(5, 8, 2);
    const PcaModel model = fit_pca_dataset(ds, 4, false, 0);
    const ShapeGraph graph = build_graph(model, ds, 4);
    const Vector x = ds.markers[2].flatten();
    const PlanResult plan = plan_shape_path(graph, model, x, x, 8, GeodesicConfig{});
    CHECK(plan.shortest_path.nodes.size() == 1);
    CHECK(plan.geodesic.nodes.size() == 1);
    CHECK(plan.geodesic.arc_length_manifold == 0.0);
}

TEST_CASE("pca planning: geodesic trace equals the linear trace exactly") {
    const ShapeDataset ds = generate_bar_dataset(10, 8, 4);
    const PcaModel model = fit_pca_dataset(ds, 4, false, 0);
    const ShapeGraph graph = build_graph(model, ds, 5);
    const Vector x0 = ds.markers[0].flatten();          // a line shape
    const Vector x1 = ds.markers[35].flatten();         // an s+ shape
    const PlanResult plan = plan_shape_path(graph, model, x0, x1, 12, GeodesicConfig{});
    REQUIRE(plan.geodesic.nodes.size() == 13);
    REQUIRE(plan.linear.nodes.size() == 13);
    for (std::size_t i = 0; i < plan.geodesic.nodes.size(); ++i)
        CHECK((plan.geodesic.nodes[i].z - plan.linear.nodes[i].z).norm() < 1e-10);
    CHECK(plan.shortest_path.provenance == "shortest-path");
    CHECK(plan.geodesic.provenance == "geodesic");
    // shortest-path trace is anchored at the query codes
    CHECK((plan.shortest_path.nodes.front().z - model.encode(x0)).norm() == 0.0);
    CHECK((plan.shortest_path.nodes.back().z - model.encode(x1)).norm() == 0.0);
}

TEST_CASE("trained-model planning: geodesic arc length <= linear and shortest path") {
    const Autoencoder model = trained_bar_model(25, 400, 3);
    const ShapeDataset ds = generate_bar_dataset(25, 8, 3);
    const ShapeGraph graph = build_graph(model, ds, 6);

    GeodesicConfig gc;
    gc.max_iterations = 4000;
    // line (class block 0) to s+ (class block 3)
    const Vector x0 = ds.markers[0].flatten();
    const Vector x1 = ds.markers[3 * 25 + 4].flatten();
    const PlanResult plan = plan_shape_path(graph, model, x0, x1, 16, gc);
    CHECK(plan.geodesic.arc_length_manifold <= plan.linear.arc_length_manifold + 1e-6);
    CHECK(plan.geodesic.arc_length_manifold <= plan.shortest_path.arc_length_manifold + 1e-6);
    // every node decodes into raw feature space (shape vectors present)
    for (const auto& node : plan.geodesic.nodes) CHECK(node.shape.size() == 24);
}

TEST_CASE("trace labels collapse consecutive duplicates deterministically") {
    // two well-separated latent clusters with known labels
    Matrix latents(10, 2);
    std::vector<std::optional<std::string>> labels(10);
    for (int i = 0; i < 10; ++i) {
        const bool left = i < 5;
        latents(i, 0) = left ? -4.0 + 0.01 * i : 4.0 + 0.01 * i;
        latents(i, 1) = 0.0;
        labels[i] = left ? "line" : "arch";
    }
    const ShapeGraph graph = ShapeGraph::build(latents, labels, 2);

    DeformationTrace trace;
    trace.provenance = "linear";
    for (int i = 0; i <= 10; ++i) {
        TraceNode node;
        node.z = (Vector(2) << -4.0 + 0.8 * i, 0.0).finished();
        node.shape = Vector::Zero(1);
        trace.nodes.push_back(node);
    }
    const auto itinerary = trace_labels(trace, graph);
    REQUIRE(itinerary.size() == 2);
    CHECK(itinerary[0] == "line");
    CHECK(itinerary[1] == "arch");
    // determinism
    const auto again = trace_labels(trace, graph);
    CHECK(again == itinerary);

    DeformationTrace empty;
    CHECK_THROWS_AS(trace_labels(empty, graph), std::invalid_argument);
}
