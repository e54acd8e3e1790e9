#include "serialization.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>

namespace softshape {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json vec_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector vec_from_json(const json& arr) {
    Vector v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
    return v;
}

json mat_to_json(const Matrix& m) {
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix mat_from_json(const json& j) {
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw std::runtime_error("matrix: data length != rows*cols");
    Matrix m(rows, cols);
    std::size_t at = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[at++].get<double>();
    return m;
}

json points_to_json(const std::vector<Vec3>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(json::array({p.x(), p.y(), p.z()}));
    return arr;
}

std::vector<Vec3> points_from_json(const json& arr) {
    std::vector<Vec3> pts(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto& p = arr[i];
        if (!p.is_array() || p.size() != 3)
            throw std::runtime_error("point " + std::to_string(i) + ": expected [x,y,z]");
        pts[i] = Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    }
    return pts;
}

json label_to_json(const std::optional<std::string>& lbl) {
    return lbl ? json(*lbl) : json(nullptr);
}

std::optional<std::string> label_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<std::string>();
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(1, '\t') << "\n";
}

json norm_to_json(const NormalizationRecord& rec) {
    if (rec.is_identity()) return json{{"mode", "identity"}};
    if (rec.mode == NormalizationMode::MeanCenter)
        return json{{"mode", "mean-center"}, {"mean", vec_to_json(rec.feat_mean)}};
    json constant = json::array();
    for (bool f : rec.constant_flag) constant.push_back(f);
    return json{{"mode", "min-max"}, {"lo", rec.lo},         {"hi", rec.hi},
                {"min", vec_to_json(rec.feat_min)}, {"max", vec_to_json(rec.feat_max)},
                {"constant", std::move(constant)}};
}

NormalizationRecord norm_from_json(const json& j) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "identity") return NormalizationRecord::identity();
    NormalizationRecord rec;
    if (mode == "mean-center") {
        rec.mode = NormalizationMode::MeanCenter;
        rec.feat_mean = vec_from_json(j.at("mean"));
        return rec;
    }
    if (mode != "min-max") throw std::runtime_error("unknown normalization mode: " + mode);
    rec.mode = NormalizationMode::MinMax;
    rec.lo = j.at("lo").get<double>();
    rec.hi = j.at("hi").get<double>();
    rec.feat_min = vec_from_json(j.at("min"));
    rec.feat_max = vec_from_json(j.at("max"));
    for (const auto& f : j.at("constant")) rec.constant_flag.push_back(f.get<bool>());
    return rec;
}

json space_to_json(const FeatureSpace& space) {
    json j{{"kind", space.name()}};
    switch (space.kind) {
        case FeatureSpace::Kind::MarkerRaw: j["q"] = space.q; break;
        case FeatureSpace::Kind::Fourier:
            j["q"] = space.q;
            j["harmonics"] = space.harmonics;
            break;
        case FeatureSpace::Kind::CloudRaw: j["resolution"] = space.resolution; break;
    }
    return j;
}

FeatureSpace space_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "markers") return FeatureSpace::marker_raw(j.at("q").get<int>());
    if (kind == "fourier")
        return FeatureSpace::fourier(j.at("q").get<int>(), j.at("harmonics").get<int>());
    if (kind == "cloud") return FeatureSpace::cloud_raw(j.at("resolution").get<int>());
    throw std::runtime_error("unknown feature space: " + kind);
}

json layer_spec_to_json(const LayerSpec& s) {
    switch (s.kind) {
        case LayerSpec::Kind::Affine: return json{{"kind", "affine"}, {"in", s.in}, {"out", s.out}};
        case LayerSpec::Kind::PointwiseConv:
            return json{{"kind", "conv1x1"}, {"in", s.in}, {"out", s.out}};
        case LayerSpec::Kind::Activation:
            return json{{"kind", "activation"}, {"fn", to_string(s.activation)}};
        case LayerSpec::Kind::MaxPoolPoints:
            return json{{"kind", "maxpool"}, {"channels", s.channels}};
        case LayerSpec::Kind::Reshape:
            return json{{"kind", "reshape"}, {"rows", s.rows}, {"cols", s.cols}};
        case LayerSpec::Kind::BatchNorm:
            return json{{"kind", "batchnorm"}, {"dim", s.dim}, {"per_channel", s.per_channel}};
    }
    throw std::logic_error("bad layer kind");
}

LayerSpec layer_spec_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "affine") return LayerSpec::affine(j.at("in").get<int>(), j.at("out").get<int>());
    if (kind == "conv1x1")
        return LayerSpec::pointwise_conv(j.at("in").get<int>(), j.at("out").get<int>());
    if (kind == "activation") return LayerSpec::act(parse_activation(j.at("fn").get<std::string>()));
    if (kind == "maxpool") return LayerSpec::max_pool_points(j.at("channels").get<int>());
    if (kind == "reshape")
        return LayerSpec::reshape(j.at("rows").get<int>(), j.at("cols").get<int>());
    if (kind == "batchnorm")
        return LayerSpec::batch_norm(j.at("dim").get<int>(), j.at("per_channel").get<bool>());
    throw std::runtime_error("unknown layer kind: " + kind);
}

json layer_params_to_json(const LayerParams& p) {
    json j = json::object();
    if (p.W.size() > 0) {
        j["W"] = mat_to_json(p.W);
        j["b"] = vec_to_json(p.b);
    }
    if (p.gamma.size() > 0) {
        j["gamma"] = vec_to_json(p.gamma);
        j["beta"] = vec_to_json(p.beta);
        j["run_mean"] = vec_to_json(p.run_mean);
        j["run_var"] = vec_to_json(p.run_var);
    }
    return j;
}

void layer_params_from_json(const json& j, LayerParams& p) {
    if (j.contains("W")) {
        p.W = mat_from_json(j.at("W"));
        p.b = vec_from_json(j.at("b"));
    }
    if (j.contains("gamma")) {
        p.gamma = vec_from_json(j.at("gamma"));
        p.beta = vec_from_json(j.at("beta"));
        p.run_mean = vec_from_json(j.at("run_mean"));
        p.run_var = vec_from_json(j.at("run_var"));
    }
}

}  // namespace

void save_dataset(const ShapeDataset& ds, const std::string& path, bool binary_sidecar) {
    json j;
    j["kind"] = ds.kind == DatasetKind::Markers ? "markers" : "cloud";
    if (ds.kind == DatasetKind::Markers) {
        j["q"] = ds.empty() ? 0 : ds.marker_dim();
        json shapes = json::array();
        for (const auto& s : ds.markers)
            shapes.push_back(json{{"label", label_to_json(s.label)},
                                  {"points", points_to_json(s.points)}});
        j["shapes"] = std::move(shapes);
    } else if (!binary_sidecar) {
        json shapes = json::array();
        for (const auto& c : ds.clouds)
            shapes.push_back(json{{"label", label_to_json(c.label)},
                                  {"points", points_to_json(c.points)}});
        j["shapes"] = std::move(shapes);
    } else {
        const std::string bin_name = fs::path(path).filename().string() + ".bin";
        const std::string bin_path = (fs::path(path).parent_path() / bin_name).string();
        std::ofstream bin(bin_path, std::ios::binary);
        if (!bin) throw std::runtime_error("cannot write " + bin_path);
        json shapes = json::array();
        std::size_t offset = 0;
        for (const auto& c : ds.clouds) {
            for (const auto& p : c.points)
                for (int d = 0; d < 3; ++d) {
                    const float f = static_cast<float>(p[d]);
                    bin.write(reinterpret_cast<const char*>(&f), sizeof(float));
                }
            shapes.push_back(json{{"label", label_to_json(c.label)},
                                  {"offset", offset},
                                  {"count", c.points.size()}});
            offset += 3 * c.points.size();
        }
        j["sidecar"] = bin_name;
        j["shapes"] = std::move(shapes);
    }
    write_json_file(j, path);
}

ShapeDataset load_dataset(const std::string& path) {
    const json j = load_json_file(path);
    const std::string kind = j.at("kind").get<std::string>();
    ShapeDataset ds;
    if (kind == "markers") {
        ds.kind = DatasetKind::Markers;
        const int q = j.at("q").get<int>();
        std::size_t i = 0;
        for (const auto& s : j.at("shapes")) {
            auto pts = points_from_json(s.at("points"));
            if (static_cast<int>(pts.size()) != q)
                throw std::runtime_error("shape " + std::to_string(i) + " has q=" +
                                         std::to_string(pts.size()) + ", dataset declares q=" +
                                         std::to_string(q));
            ds.markers.emplace_back(std::move(pts), label_from_json(s.at("label")));
            ++i;
        }
        return ds;
    }
    if (kind != "cloud") throw std::runtime_error("unknown dataset kind: " + kind);
    ds.kind = DatasetKind::Cloud;
    if (j.contains("sidecar")) {
        const std::string bin_path =
            (fs::path(path).parent_path() / j.at("sidecar").get<std::string>()).string();
        std::ifstream bin(bin_path, std::ios::binary);
        if (!bin) throw std::runtime_error("cannot open sidecar " + bin_path);
        std::vector<char> bytes((std::istreambuf_iterator<char>(bin)),
                                std::istreambuf_iterator<char>());
        const std::size_t n_floats = bytes.size() / sizeof(float);
        for (const auto& s : j.at("shapes")) {
            const std::size_t offset = s.at("offset").get<std::size_t>();
            const std::size_t count = s.at("count").get<std::size_t>();
            if (offset + 3 * count > n_floats)
                throw std::runtime_error("sidecar out of range for a shape in " + path);
            std::vector<Vec3> pts(count);
            for (std::size_t i = 0; i < count; ++i) {
                float f[3];
                std::memcpy(f, bytes.data() + (offset + 3 * i) * sizeof(float), sizeof(f));
                pts[i] = Vec3(f[0], f[1], f[2]);
            }
            ds.clouds.emplace_back(std::move(pts), label_from_json(s.at("label")));
        }
        return ds;
    }
    for (const auto& s : j.at("shapes"))
        ds.clouds.emplace_back(points_from_json(s.at("points")), label_from_json(s.at("label")));
    return ds;
}

void export_dataset_csv(const ShapeDataset& ds, const std::string& path) {
    const Matrix X = ds.feature_matrix();
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto& lbl = ds.label_of(i);
        labels.push_back(lbl ? *lbl : "");
    }
    save_matrix_csv(X, path, labels);
}

void save_model(const LatentModel& model, const std::string& path) {
    json j;
    j["kind"] = model.kind();
    j["feature_space"] = space_to_json(model.feature_space());
    j["normalization"] = norm_to_json(model.normalization());
    if (model.kind() == "pca") {
        const auto& pca = dynamic_cast<const PcaModel&>(model);
        j["mean"] = vec_to_json(pca.mean());
        j["components"] = mat_to_json(pca.components());
        j["variances"] = vec_to_json(pca.variances());
        j["k"] = pca.latent_dim();
    } else {
        const auto& ae = dynamic_cast<const Autoencoder&>(model);
        json enc_specs = json::array(), dec_specs = json::array();
        for (const auto& s : ae.encoder_spec()) enc_specs.push_back(layer_spec_to_json(s));
        for (const auto& s : ae.decoder_spec()) dec_specs.push_back(layer_spec_to_json(s));
        j["arch"] = json{{"encoder", std::move(enc_specs)}, {"decoder", std::move(dec_specs)}};
        json enc_params = json::array(), dec_params = json::array();
        for (const auto& p : ae.encoder_params()) enc_params.push_back(layer_params_to_json(p));
        for (const auto& p : ae.decoder_params()) dec_params.push_back(layer_params_to_json(p));
        j["parameters"] = json{{"encoder", std::move(enc_params)},
                               {"decoder", std::move(dec_params)}};
        j["loss"] = to_string(ae.loss());
        j["latent"] = ae.latent_dim();
        json log = json::array();
        for (const auto& e : ae.training_log())
            log.push_back(json{{"epoch", e.epoch},
                               {"train_loss", e.train_loss},
                               {"val_loss", e.val_loss}});
        j["training_log"] = std::move(log);
    }
    write_json_file(j, path);
}

std::unique_ptr<LatentModel> load_model(const std::string& path) {
    const json j = load_json_file(path);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "pca") {
        auto model = std::make_unique<PcaModel>(
            vec_from_json(j.at("mean")), mat_from_json(j.at("components")),
            vec_from_json(j.at("variances")), j.at("k").get<int>(),
            space_from_json(j.at("feature_space")), norm_from_json(j.at("normalization")));
        return model;
    }
    if (kind != "autoencoder") throw std::runtime_error("unknown model kind: " + kind);
    std::vector<LayerSpec> enc, dec;
    for (const auto& s : j.at("arch").at("encoder")) enc.push_back(layer_spec_from_json(s));
    for (const auto& s : j.at("arch").at("decoder")) dec.push_back(layer_spec_from_json(s));
    auto model = std::make_unique<Autoencoder>(std::move(enc), std::move(dec), 0);
    const auto& params = j.at("parameters");
    const auto& enc_params = params.at("encoder");
    const auto& dec_params = params.at("decoder");
    if (enc_params.size() != model->encoder_params().size() ||
        dec_params.size() != model->decoder_params().size())
        throw std::runtime_error("checkpoint: parameter/arch layer count mismatch");
    for (std::size_t i = 0; i < enc_params.size(); ++i)
        layer_params_from_json(enc_params[i], model->encoder_params()[i]);
    for (std::size_t i = 0; i < dec_params.size(); ++i)
        layer_params_from_json(dec_params[i], model->decoder_params()[i]);
    model->set_feature_space(space_from_json(j.at("feature_space")));
    model->set_normalization(norm_from_json(j.at("normalization")));
    model->set_loss(parse_loss(j.at("loss").get<std::string>()));
    for (const auto& e : j.at("training_log"))
        model->training_log().push_back(EpochStats{e.at("epoch").get<int>(),
                                                   e.at("train_loss").get<double>(),
                                                   e.at("val_loss").get<double>()});
    return model;
}

void save_graph(const ShapeGraph& graph, const std::string& path) {
    json nodes = json::array();
    for (const auto& n : graph.nodes())
        nodes.push_back(json{{"z", vec_to_json(n.z)},
                             {"label", label_to_json(n.label)},
                             {"index", n.index}});
    json edges = json::array();
    for (const auto& [a, b, w] : graph.edges()) edges.push_back(json::array({a, b, w}));
    write_json_file(json{{"kind", "graph"},
                         {"k_g", graph.k_g()},
                         {"k_classify", graph.k_classify()},
                         {"nodes", std::move(nodes)},
                         {"edges", std::move(edges)}},
                    path);
}

ShapeGraph load_graph(const std::string& path) {
    const json j = load_json_file(path);
    if (j.at("kind").get<std::string>() != "graph")
        throw std::runtime_error(path + " is not a graph file");
    std::vector<ShapeGraph::Node> nodes;
    for (const auto& n : j.at("nodes"))
        nodes.push_back(ShapeGraph::Node{vec_from_json(n.at("z")),
                                         label_from_json(n.at("label")),
                                         n.at("index").get<int>()});
    std::vector<std::tuple<int, int, double>> edges;
    for (const auto& e : j.at("edges"))
        edges.emplace_back(e[0].get<int>(), e[1].get<int>(), e[2].get<double>());
    return ShapeGraph::from_parts(std::move(nodes), std::move(edges), j.at("k_g").get<int>(),
                                  j.at("k_classify").get<int>());
}

void save_trace(const DeformationTrace& trace, const FeatureSpace& space,
                const std::string& path) {
    json nodes = json::array();
    for (const auto& n : trace.nodes) {
        json node{{"z", vec_to_json(n.z)},
                  {"shape", vec_to_json(n.shape)},
                  {"label", label_to_json(n.predicted_label)}};
        if (!n.tag.empty()) node["tag"] = n.tag;
        nodes.push_back(std::move(node));
    }
    json energy = json::array();
    for (double e : trace.energy_log) energy.push_back(e);
    write_json_file(json{{"kind", "trace"},
                         {"provenance", trace.provenance},
                         {"feature_space", space_to_json(space)},
                         {"arc_length_manifold", trace.arc_length_manifold},
                         {"energy_log", std::move(energy)},
                         {"nodes", std::move(nodes)}},
                    path);
}

LoadedTrace load_trace(const std::string& path) {
    const json j = load_json_file(path);
    if (j.at("kind").get<std::string>() != "trace")
        throw std::runtime_error(path + " is not a trace file");
    LoadedTrace out;
    out.space = space_from_json(j.at("feature_space"));
    out.trace.provenance = j.at("provenance").get<std::string>();
    out.trace.arc_length_manifold = j.at("arc_length_manifold").get<double>();
    for (const auto& e : j.at("energy_log")) out.trace.energy_log.push_back(e.get<double>());
    for (const auto& n : j.at("nodes")) {
        TraceNode node;
        node.z = vec_from_json(n.at("z"));
        node.shape = vec_from_json(n.at("shape"));
        node.predicted_label = label_from_json(n.at("label"));
        if (n.contains("tag")) node.tag = n.at("tag").get<std::string>();
        out.trace.nodes.push_back(std::move(node));
    }
    return out;
}

Vector load_vector_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<double> values;
    std::string token;
    while (in) {
        int c = in.peek();
        if (c == EOF) break;
        if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t') {
            in.get();
            continue;
        }
        double v;
        if (!(in >> v)) throw std::runtime_error("malformed number in " + path);
        values.push_back(v);
        // consume a trailing comma if present
        while (in.peek() == ',') in.get();
    }
    Vector out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i];
    return out;
}

void save_vector_csv(const Vector& v, const std::string& path) {
    Matrix m(1, v.size());
    m.row(0) = v.transpose();
    save_matrix_csv(m, path);
}

void save_matrix_csv(const Matrix& m, const std::string& path,
                     const std::vector<std::string>& last_column) {
    if (!last_column.empty() && static_cast<Eigen::Index>(last_column.size()) != m.rows())
        throw std::invalid_argument("save_matrix_csv: one label per row required");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[32];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
            out << buf;
            if (c + 1 < m.cols() || !last_column.empty()) out << ",";
        }
        if (!last_column.empty()) out << last_column[r];
        out << "\n";
    }
}

std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::uint64_t hash = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ull;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

}  // namespace softshape
