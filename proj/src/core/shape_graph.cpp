#include "shape_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

namespace softshape {

namespace {

bool lex_less_vec(const Vector& a, const Vector& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] != b[i]) return a[i] < b[i];
    }
    return false;
}

struct Candidate {
    double dist;
    int label_id;  // position in the label table
    const Vector* z;
    int index;
};

// Order-independent candidate ranking: distance, then label, then latent
// coordinates. Node indices never decide, so classification is invariant
// under dataset permutation.
bool candidate_less(const Candidate& a, const Candidate& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.label_id != b.label_id) return a.label_id < b.label_id;
    return lex_less_vec(*a.z, *b.z);
}

ClassifyResult classify_from_candidates(std::vector<Candidate>& cands, int k,
                                        const std::vector<std::string>& table) {
    std::sort(cands.begin(), cands.end(), candidate_less);
    ClassifyResult result;
    for (int i = 0; i < k; ++i) {
        const std::string& lbl = table[cands[i].label_id];
        result.votes[lbl] += 1;
        result.vote_distance[lbl] += cands[i].dist;
    }
    int best_votes = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (const auto& lbl : table) {
        auto it = result.votes.find(lbl);
        if (it == result.votes.end()) continue;
        const double dist = result.vote_distance[lbl];
        if (it->second > best_votes || (it->second == best_votes && dist < best_dist)) {
            best_votes = it->second;
            best_dist = dist;
            result.label = lbl;
        }
    }
    return result;
}

}  // namespace

void ShapeGraph::rebuild_index() {
    adjacency_.assign(nodes_.size(), {});
    for (const auto& [a, b, w] : edges_) {
        adjacency_[a].push_back({b, w});
        adjacency_[b].push_back({a, w});
    }
    std::set<std::string> labels;
    for (const auto& n : nodes_)
        if (n.label) labels.insert(*n.label);
    label_table_.assign(labels.begin(), labels.end());
}

ShapeGraph ShapeGraph::build(const Matrix& latents,
                             const std::vector<std::optional<std::string>>& labels, int k_g,
                             const Decoder* ambient_decoder, bool bridge_components) {
    const int n = static_cast<int>(latents.rows());
    if (n < 2) throw std::invalid_argument("ShapeGraph: need at least 2 nodes");
    if (static_cast<int>(labels.size()) != n)
        throw std::invalid_argument("ShapeGraph: one label slot per row required");
    if (k_g < 1 || k_g >= n)
        throw std::invalid_argument("ShapeGraph: k_g must be in [1, node count)");

    ShapeGraph graph;
    graph.k_g_ = k_g;
    graph.nodes_.resize(n);
    for (int i = 0; i < n; ++i)
        graph.nodes_[i] = Node{latents.row(i).transpose(), labels[i], i};

    std::vector<Vector> decoded;
    if (ambient_decoder) {
        decoded.resize(n);
        for (int i = 0; i < n; ++i) decoded[i] = ambient_decoder->decode(graph.nodes_[i].z);
    }

    std::set<std::pair<int, int>> edge_set;
    std::vector<std::pair<double, int>> dists(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            dists[j] = {j == i ? std::numeric_limits<double>::infinity()
                               : (latents.row(i) - latents.row(j)).norm(),
                        j};
        std::partial_sort(dists.begin(), dists.begin() + k_g, dists.end());
        for (int m = 0; m < k_g; ++m) {
            const int j = dists[m].second;
            edge_set.insert({std::min(i, j), std::max(i, j)});
        }
    }
    for (const auto& [a, b] : edge_set) {
        double w = ambient_decoder ? (decoded[a] - decoded[b]).norm()
                                   : (latents.row(a) - latents.row(b)).norm();
        // Duplicate latent codes would give a zero-weight edge; keep the
        // edge usable for shortest paths.
        w = std::max(w, 1e-15);
        graph.edges_.emplace_back(a, b, w);
    }
    graph.rebuild_index();

    if (bridge_components) {
        // Tight shape clusters can leave the kNN graph in pieces; link each
        // piece through its closest pair so shortest-path planning spans the
        // whole dataset.
        auto comps = graph.connected_components();
        while (comps.size() > 1) {
            int best_a = -1, best_b = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (int a : comps[0])
                for (std::size_t c = 1; c < comps.size(); ++c)
                    for (int b : comps[c]) {
                        const double d = (latents.row(a) - latents.row(b)).norm();
                        if (d < best_d) {
                            best_d = d;
                            best_a = a;
                            best_b = b;
                        }
                    }
            double w = ambient_decoder ? (decoded[best_a] - decoded[best_b]).norm() : best_d;
            w = std::max(w, 1e-15);
            graph.edges_.emplace_back(std::min(best_a, best_b), std::max(best_a, best_b), w);
            graph.rebuild_index();
            comps = graph.connected_components();
        }
    }
    return graph;
}

ShapeGraph ShapeGraph::from_parts(std::vector<Node> nodes,
                                  std::vector<std::tuple<int, int, double>> edges, int k_g,
                                  int k_classify) {
    ShapeGraph graph;
    graph.nodes_ = std::move(nodes);
    graph.edges_ = std::move(edges);
    graph.k_g_ = k_g;
    graph.k_classify_ = k_classify;
    graph.rebuild_index();
    return graph;
}

void ShapeGraph::set_k_classify(int k) {
    if (k < 1 || k > size())
        throw std::invalid_argument("set_k_classify: k must be in [1, node count]");
    k_classify_ = k;
}

ClassifyResult ShapeGraph::knn_classify(const Vector& z, int k) const {
    if (k == 0) k = k_classify_;
    if (nodes_.empty()) throw std::invalid_argument("knn_classify: empty graph");
    if (z.size() != latent_dim()) throw std::invalid_argument("knn_classify: dimension mismatch");
    std::vector<Candidate> cands;
    cands.reserve(nodes_.size());
    for (const auto& node : nodes_) {
        if (!node.label) continue;
        const int label_id = static_cast<int>(
            std::lower_bound(label_table_.begin(), label_table_.end(), *node.label) -
            label_table_.begin());
        cands.push_back({(node.z - z).norm(), label_id, &node.z, node.index});
    }
    if (k > static_cast<int>(cands.size()))
        throw std::invalid_argument("knn_classify: k exceeds labeled node count");
    return classify_from_candidates(cands, k, label_table_);
}

int ShapeGraph::nearest_node(const Vector& z) const {
    if (nodes_.empty()) throw std::invalid_argument("nearest_node: empty graph");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < size(); ++i) {
        const double d = (nodes_[i].z - z).norm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

std::vector<std::vector<int>> ShapeGraph::connected_components() const {
    std::vector<int> comp(nodes_.size(), -1);
    std::vector<std::vector<int>> out;
    for (int start = 0; start < size(); ++start) {
        if (comp[start] >= 0) continue;
        const int id = static_cast<int>(out.size());
        out.emplace_back();
        std::vector<int> stack{start};
        comp[start] = id;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            out[id].push_back(v);
            for (const auto& [u, w] : adjacency_[v]) {
                if (comp[u] < 0) {
                    comp[u] = id;
                    stack.push_back(u);
                }
            }
        }
    }
    return out;
}

std::pair<std::vector<int>, double> ShapeGraph::shortest_path(int src, int dst) const {
    if (src < 0 || src >= size() || dst < 0 || dst >= size())
        throw std::invalid_argument("shortest_path: node index out of range");

    std::vector<double> dist(nodes_.size(), std::numeric_limits<double>::infinity());
    std::vector<int> prev(nodes_.size(), -1);
    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    dist[src] = 0.0;
    heap.push({0.0, src});
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        if (v == dst) break;
        for (const auto& [u, w] : adjacency_[v]) {
            const double nd = d + w;
            if (nd < dist[u]) {
                dist[u] = nd;
                prev[u] = v;
                heap.push({nd, u});
            }
        }
    }
    if (!std::isfinite(dist[dst])) {
        const auto comps = connected_components();
        std::string msg = "shortest_path: nodes " + std::to_string(src) + " and " +
                          std::to_string(dst) + " are disconnected; components:";
        for (std::size_t c = 0; c < comps.size(); ++c)
            msg += " [" + std::to_string(c) + "]=" + std::to_string(comps[c].size()) + " nodes";
        throw std::runtime_error(msg);
    }
    std::vector<int> path;
    for (int v = dst; v != -1; v = prev[v]) path.push_back(v);
    std::reverse(path.begin(), path.end());
    return {path, dist[dst]};
}

CvResult select_k_cv(const Matrix& latents, const std::vector<std::optional<std::string>>& labels,
                     const std::vector<int>& candidate_ks, int folds, std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("select_k_cv: need at least 2 folds");
    if (candidate_ks.empty()) throw std::invalid_argument("select_k_cv: no candidate ks");
    const int n = static_cast<int>(latents.rows());
    if (static_cast<int>(labels.size()) != n)
        throw std::invalid_argument("select_k_cv: label count mismatch");

    // Stratified fold assignment: shuffle within each class, deal round-robin.
    std::map<std::string, std::vector<int>> by_label;
    for (int i = 0; i < n; ++i) {
        if (!labels[i]) continue;
        by_label[*labels[i]].push_back(i);
    }
    if (by_label.empty()) throw std::invalid_argument("select_k_cv: no labeled samples");
    std::vector<std::string> table;
    for (const auto& [lbl, idxs] : by_label) {
        if (static_cast<int>(idxs.size()) < folds)
            throw std::invalid_argument("select_k_cv: class '" + lbl + "' has " +
                                        std::to_string(idxs.size()) + " samples, need >= " +
                                        std::to_string(folds));
        table.push_back(lbl);
    }
    std::mt19937_64 rng(seed);
    std::vector<int> fold_of(n, -1);
    for (auto& [lbl, idxs] : by_label) {
        std::shuffle(idxs.begin(), idxs.end(), rng);
        for (std::size_t i = 0; i < idxs.size(); ++i)
            fold_of[idxs[i]] = static_cast<int>(i % folds);
    }

    auto label_id = [&](const std::string& lbl) {
        return static_cast<int>(std::lower_bound(table.begin(), table.end(), lbl) - table.begin());
    };

    CvResult result;
    result.ks = candidate_ks;
    result.mean_error.assign(candidate_ks.size(), 0.0);
    for (std::size_t ki = 0; ki < candidate_ks.size(); ++ki) {
        const int k = candidate_ks[ki];
        if (k < 1) throw std::invalid_argument("select_k_cv: candidate k must be >= 1");
        double err_sum = 0.0;
        for (int f = 0; f < folds; ++f) {
            int wrong = 0, total = 0;
            for (int i = 0; i < n; ++i) {
                if (fold_of[i] != f) continue;
                std::vector<Candidate> cands;
                for (int j = 0; j < n; ++j) {
                    if (fold_of[j] == f || !labels[j]) continue;
                    cands.push_back({(latents.row(j) - latents.row(i)).norm(),
                                     label_id(*labels[j]), nullptr, j});
                }
                // Latent rows are distinct samples; break residual ties by
                // training index for determinism.
                std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
                    if (a.dist != b.dist) return a.dist < b.dist;
                    if (a.label_id != b.label_id) return a.label_id < b.label_id;
                    return a.index < b.index;
                });
                const int kk = std::min<int>(k, static_cast<int>(cands.size()));
                std::map<std::string, int> votes;
                std::map<std::string, double> vote_dist;
                for (int m = 0; m < kk; ++m) {
                    const std::string& lbl = table[cands[m].label_id];
                    votes[lbl] += 1;
                    vote_dist[lbl] += cands[m].dist;
                }
                std::string pred;
                int best_votes = -1;
                double best_dist = std::numeric_limits<double>::infinity();
                for (const auto& lbl : table) {
                    auto it = votes.find(lbl);
                    if (it == votes.end()) continue;
                    if (it->second > best_votes ||
                        (it->second == best_votes && vote_dist[lbl] < best_dist)) {
                        best_votes = it->second;
                        best_dist = vote_dist[lbl];
                        pred = lbl;
                    }
                }
                ++total;
                if (pred != *labels[i]) ++wrong;
            }
            err_sum += total > 0 ? static_cast<double>(wrong) / total : 0.0;
        }
        result.mean_error[ki] = err_sum / folds;
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < candidate_ks.size(); ++i) {
        if (result.mean_error[i] < result.mean_error[best] ||
            (result.mean_error[i] == result.mean_error[best] &&
             candidate_ks[i] < candidate_ks[best]))
            best = i;
    }
    result.best_k = candidate_ks[best];
    return result;
}

}  // namespace softshape
