#pragma once

#include <map>
#include <set>

#include "latent_model.hpp"

namespace softshape {

struct ClassifyResult {
    std::string label;
    std::map<std::string, int> votes;
    std::map<std::string, double> vote_distance;  // summed distance per voting label
};

/// kNN graph over encoded dataset shapes. Nodes keep their latent code,
/// label and original dataset index; each node links to its k_g nearest
/// latent neighbors (Euclidean), edges symmetrized.
class ShapeGraph {
public:
    struct Node {
        Vector z;
        std::optional<std::string> label;
        int index = 0;
    };

    ShapeGraph() = default;

    /// weight_by_ambient: weight edges by decoded distance ||g(za)-g(zb)||
    /// instead of latent distance (needs the decoder). bridge_components
    /// repairs a disconnected kNN graph by linking each separate component
    /// through its closest node pair, so dataset-restricted planning works
    /// across well-separated shape clusters; pass false to keep the raw kNN
    /// topology (disconnected queries then fail loudly).
    static ShapeGraph build(const Matrix& latents,
                            const std::vector<std::optional<std::string>>& labels, int k_g,
                            const Decoder* ambient_decoder = nullptr,
                            bool bridge_components = true);

    /// Reassembles a graph from serialized parts (trusts the edge list).
    static ShapeGraph from_parts(std::vector<Node> nodes,
                                 std::vector<std::tuple<int, int, double>> edges, int k_g,
                                 int k_classify);

    int size() const { return static_cast<int>(nodes_.size()); }
    int latent_dim() const { return size() ? static_cast<int>(nodes_[0].z.size()) : 0; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<std::tuple<int, int, double>>& edges() const { return edges_; }
    int k_g() const { return k_g_; }
    int k_classify() const { return k_classify_; }
    void set_k_classify(int k);

    /// Sorted unique labels; the position is the label index used by the
    /// deterministic tie-break.
    const std::vector<std::string>& label_table() const { return label_table_; }

    /// Majority vote among the k nearest labeled nodes. Ties break toward
    /// the smaller summed distance, then the smaller label index.
    ClassifyResult knn_classify(const Vector& z, int k = 0) const;

    int nearest_node(const Vector& z) const;

    /// Shortest path by edge weight; throws when src and dst are in
    /// different components, listing the components.
    std::pair<std::vector<int>, double> shortest_path(int src, int dst) const;

    std::vector<std::vector<int>> connected_components() const;

private:
    std::vector<Node> nodes_;
    std::vector<std::tuple<int, int, double>> edges_;
    std::vector<std::vector<std::pair<int, double>>> adjacency_;
    std::vector<std::string> label_table_;
    int k_g_ = 0;
    int k_classify_ = 5;

    void rebuild_index();
};

struct CvResult {
    std::vector<int> ks;
    std::vector<double> mean_error;  // misclassification rate per candidate k
    int best_k = 0;
};

/// Deterministic stratified k-fold cross-validation for the kNN classifier.
/// Returns the error curve and the argmin k (ties favor the smaller k).
/// Every class must have at least `folds` labeled samples.
CvResult select_k_cv(const Matrix& latents, const std::vector<std::optional<std::string>>& labels,
                     const std::vector<int>& candidate_ks, int folds, std::uint64_t seed);

}  // namespace softshape
