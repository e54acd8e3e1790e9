#include "softshape/softshape.h"

#include <cstring>
#include <string>

#include "generators.hpp"
#include "fourier.hpp"
#include "nn_train.hpp"
#include "pipeline.hpp"
#include "sampling.hpp"
#include "serialization.hpp"
#include "svg.hpp"

using namespace softshape;

struct ss_dataset {
    ShapeDataset ds;
};
struct ss_model {
    std::unique_ptr<LatentModel> model;
};
struct ss_graph {
    ShapeGraph graph;
};
struct ss_trace {
    DeformationTrace trace;
    FeatureSpace space;
};

namespace {

thread_local std::string g_last_error;

ss_status fail(ss_status code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

// Maps C++ exceptions out of the core onto status codes.
template <typename F>
ss_status guarded(F&& fn) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        return fail(SS_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(SS_ERR_RUNTIME, e.what());
    }
}

ss_status copy_string(const std::string& s, char* buf, size_t buf_len) {
    if (!buf || buf_len == 0 || s.size() + 1 > buf_len)
        return fail(SS_ERR_BUFFER_TOO_SMALL,
                    "buffer too small: need " + std::to_string(s.size() + 1) + " bytes");
    std::memcpy(buf, s.c_str(), s.size() + 1);
    return SS_OK;
}

ss_status require(bool cond, const char* what) {
    return cond ? SS_OK : fail(SS_ERR_INVALID_ARGUMENT, what);
}

GeodesicConfig to_core(const ss_geodesic_config* cfg) {
    GeodesicConfig gc;
    if (cfg) {
        gc.learning_rate = cfg->learning_rate;
        gc.tolerance = cfg->tolerance;
        gc.max_iterations = cfg->max_iterations;
        gc.segments = cfg->segments;
        gc.jacobi_updates = cfg->jacobi_updates != 0;
    }
    return gc;
}

void fill_report(const GeodesicReport& r, ss_geodesic_report* out) {
    if (!out) return;
    out->converged = r.converged ? 1 : 0;
    out->diverged = r.diverged ? 1 : 0;
    out->iterations = r.iterations;
    out->initial_energy = r.initial_energy;
    out->final_energy = r.final_energy;
    out->final_gradient_norm_sq = r.final_gradient_norm_sq;
}

ss_trace* wrap_trace(DeformationTrace trace, FeatureSpace space) {
    return new ss_trace{std::move(trace), std::move(space)};
}

}  // namespace

extern "C" {

const char* ss_version(void) { return "0.1.0"; }

const char* ss_last_error(void) { return g_last_error.c_str(); }

ss_status ss_dataset_generate_bars(int per_class, int q, uint64_t seed, ss_dataset** out) {
    if (auto s = require(out != nullptr, "out is null")) return s;
    return guarded([&] {
        *out = new ss_dataset{generate_bar_dataset(per_class, q, seed)};
        return SS_OK;
    });
}

ss_status ss_dataset_generate_sheets(int per_class, int n_raw, int resample_to, uint64_t seed,
                                     ss_dataset** out) {
    if (auto s = require(out != nullptr, "out is null")) return s;
    return guarded([&] {
        *out = new ss_dataset{generate_sheet_dataset(per_class, n_raw, seed, resample_to)};
        return SS_OK;
    });
}

ss_status ss_dataset_load(const char* path, ss_dataset** out) {
    if (auto s = require(path && out, "path/out is null")) return s;
    return guarded([&] {
        *out = new ss_dataset{load_dataset(path)};
        return SS_OK;
    });
}

ss_status ss_dataset_save(const ss_dataset* d, const char* path, int binary_sidecar) {
    if (auto s = require(d && path, "dataset/path is null")) return s;
    return guarded([&] {
        save_dataset(d->ds, path, binary_sidecar != 0);
        return SS_OK;
    });
}

ss_status ss_dataset_export_csv(const ss_dataset* d, const char* path) {
    if (auto s = require(d && path, "dataset/path is null")) return s;
    return guarded([&] {
        export_dataset_csv(d->ds, path);
        return SS_OK;
    });
}

ss_status ss_dataset_size(const ss_dataset* d, size_t* out) {
    if (auto s = require(d && out, "dataset/out is null")) return s;
    *out = d->ds.size();
    return SS_OK;
}

ss_status ss_dataset_kind(const ss_dataset* d, int* out) {
    if (auto s = require(d && out, "dataset/out is null")) return s;
    *out = d->ds.kind == DatasetKind::Markers ? 0 : 1;
    return SS_OK;
}

ss_status ss_dataset_label(const ss_dataset* d, size_t index, char* buf, size_t buf_len) {
    if (auto s = require(d != nullptr, "dataset is null")) return s;
    return guarded([&] {
        if (index >= d->ds.size()) throw std::invalid_argument("shape index out of range");
        const auto& lbl = d->ds.label_of(index);
        return copy_string(lbl ? *lbl : "", buf, buf_len);
    });
}

void ss_dataset_free(ss_dataset* d) { delete d; }

ss_status ss_fit_fourier_csv(const ss_dataset* d, int harmonics, const char* out_csv) {
    if (auto s = require(d && out_csv, "dataset/path is null")) return s;
    return guarded([&] {
        const Matrix X = fourier_feature_matrix(d->ds, harmonics);
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < d->ds.size(); ++i) {
            const auto& lbl = d->ds.label_of(i);
            labels.push_back(lbl ? *lbl : "");
        }
        save_matrix_csv(X, out_csv, labels);
        return SS_OK;
    });
}

ss_status ss_chamfer_distance(const double* xyz_a, size_t n_a, const double* xyz_b, size_t n_b,
                              double* out) {
    if (auto s = require(xyz_a && xyz_b && out, "null argument")) return s;
    return guarded([&] {
        std::vector<Vec3> a(n_a), b(n_b);
        for (size_t i = 0; i < n_a; ++i) a[i] = Vec3(xyz_a[3 * i], xyz_a[3 * i + 1], xyz_a[3 * i + 2]);
        for (size_t i = 0; i < n_b; ++i) b[i] = Vec3(xyz_b[3 * i], xyz_b[3 * i + 1], xyz_b[3 * i + 2]);
        *out = chamfer_distance(PointCloud(std::move(a)), PointCloud(std::move(b)));
        return SS_OK;
    });
}

ss_status ss_farthest_point_sample(const double* xyz, size_t n, size_t n_out, double* out_xyz) {
    if (auto s = require(xyz && out_xyz, "null argument")) return s;
    return guarded([&] {
        std::vector<Vec3> pts(n);
        for (size_t i = 0; i < n; ++i) pts[i] = Vec3(xyz[3 * i], xyz[3 * i + 1], xyz[3 * i + 2]);
        const PointCloud sampled =
            farthest_point_sample(PointCloud(std::move(pts)), static_cast<int>(n_out));
        for (size_t i = 0; i < n_out; ++i)
            for (int c = 0; c < 3; ++c) out_xyz[3 * i + c] = sampled.points[i][c];
        return SS_OK;
    });
}

void ss_train_config_defaults(ss_train_config* cfg) {
    if (!cfg) return;
    cfg->epochs = 100;
    cfg->batch_size = 32;
    cfg->learning_rate = 1e-3;
    cfg->optimizer = 2;
    cfg->seed = 0;
    cfg->val_fraction = 0.1;
    cfg->loss = 0;
}

ss_status ss_fit_pca(const ss_dataset* d, int k, int use_fourier, int harmonics, ss_model** out) {
    if (auto s = require(d && out, "dataset/out is null")) return s;
    return guarded([&] {
        auto model = std::make_unique<PcaModel>(
            fit_pca_dataset(d->ds, k, use_fourier != 0, harmonics));
        *out = new ss_model{std::move(model)};
        return SS_OK;
    });
}

ss_status ss_train_autoencoder(const ss_dataset* d, int arch, int latent, int resolution,
                               const ss_train_config* cfg, ss_model** out) {
    if (auto s = require(d && cfg && out, "null argument")) return s;
    return guarded([&] {
        TrainConfig config;
        config.epochs = cfg->epochs;
        config.batch_size = cfg->batch_size;
        config.learning_rate = cfg->learning_rate;
        config.optimizer = static_cast<TrainConfig::Optimizer>(cfg->optimizer);
        config.seed = cfg->seed;
        config.val_fraction = cfg->val_fraction;
        config.loss = cfg->loss == 1 ? LossKind::Chamfer : LossKind::Mse;

        std::unique_ptr<Autoencoder> model;
        if (arch == 0 || arch == 2) {
            if (d->ds.kind != DatasetKind::Markers)
                throw std::invalid_argument("marker preset needs a marker dataset");
            model = std::make_unique<Autoencoder>(build_marker_preset(
                config.seed, d->ds.marker_dim(), latent > 0 ? latent : 4, arch == 2));
        } else if (arch == 1) {
            model = std::make_unique<Autoencoder>(
                build_cloud_preset(config.seed, resolution > 0 ? resolution : 512));
        } else {
            throw std::invalid_argument("arch must be 0 (marker), 1 (cloud), or 2 (marker-smooth)");
        }
        model->set_loss(config.loss);
        train_on_dataset(*model, d->ds, config);
        *out = new ss_model{std::move(model)};
        return SS_OK;
    });
}

ss_status ss_model_load(const char* path, ss_model** out) {
    if (auto s = require(path && out, "path/out is null")) return s;
    return guarded([&] {
        *out = new ss_model{load_model(path)};
        return SS_OK;
    });
}

ss_status ss_model_save(const ss_model* m, const char* path) {
    if (auto s = require(m && path, "model/path is null")) return s;
    return guarded([&] {
        save_model(*m->model, path);
        return SS_OK;
    });
}

ss_status ss_model_kind(const ss_model* m, int* out) {
    if (auto s = require(m && out, "model/out is null")) return s;
    *out = m->model->kind() == "pca" ? 0 : 1;
    return SS_OK;
}

ss_status ss_model_latent_dim(const ss_model* m, int* out) {
    if (auto s = require(m && out, "model/out is null")) return s;
    *out = m->model->latent_dim();
    return SS_OK;
}

ss_status ss_model_feature_dim(const ss_model* m, int* out) {
    if (auto s = require(m && out, "model/out is null")) return s;
    *out = m->model->feature_space().dim();
    return SS_OK;
}

ss_status ss_model_explained_variance(const ss_model* m, int k, double* out) {
    if (auto s = require(m && out, "model/out is null")) return s;
    return guarded([&] {
        const auto* pca = dynamic_cast<const PcaModel*>(m->model.get());
        if (!pca) throw std::invalid_argument("explained variance applies to PCA models");
        *out = pca->explained_variance(k);
        return SS_OK;
    });
}

void ss_model_free(ss_model* m) { delete m; }

ss_status ss_model_encode_shape(const ss_model* m, const ss_dataset* d, size_t index, double* z,
                                size_t z_len) {
    if (auto s = require(m && d && z, "null argument")) return s;
    return guarded([&] {
        const Vector code = m->model->encode(model_features_for_shape(*m->model, d->ds, index));
        if (z_len < static_cast<size_t>(code.size()))
            throw std::invalid_argument("latent buffer too small");
        for (Eigen::Index i = 0; i < code.size(); ++i) z[i] = code[i];
        return SS_OK;
    });
}

ss_status ss_model_encode_dataset(const ss_model* m, const ss_dataset* d, double* z,
                                  size_t z_len) {
    if (auto s = require(m && d && z, "null argument")) return s;
    return guarded([&] {
        const Matrix Z = encode_dataset(*m->model, d->ds);
        if (z_len < static_cast<size_t>(Z.size()))
            throw std::invalid_argument("latent buffer too small");
        size_t at = 0;
        for (Eigen::Index r = 0; r < Z.rows(); ++r)
            for (Eigen::Index c = 0; c < Z.cols(); ++c) z[at++] = Z(r, c);
        return SS_OK;
    });
}

ss_status ss_model_reconstruct(const ss_model* m, const double* z, size_t z_len, double* features,
                               size_t features_len) {
    if (auto s = require(m && z && features, "null argument")) return s;
    return guarded([&] {
        if (z_len != static_cast<size_t>(m->model->latent_dim()))
            throw std::invalid_argument("latent length mismatch");
        Vector code(z_len);
        for (size_t i = 0; i < z_len; ++i) code[i] = z[i];
        const Vector rec = m->model->reconstruct(code);
        if (features_len < static_cast<size_t>(rec.size()))
            throw std::invalid_argument("feature buffer too small");
        for (Eigen::Index i = 0; i < rec.size(); ++i) features[i] = rec[i];
        return SS_OK;
    });
}

ss_status ss_model_decoder_jacobian(const ss_model* m, const double* z, size_t z_len, double* jac,
                                    size_t jac_len) {
    if (auto s = require(m && z && jac, "null argument")) return s;
    return guarded([&] {
        if (z_len != static_cast<size_t>(m->model->latent_dim()))
            throw std::invalid_argument("latent length mismatch");
        Vector code(z_len);
        for (size_t i = 0; i < z_len; ++i) code[i] = z[i];
        const Matrix J = m->model->decoder_jacobian(code);
        if (jac_len < static_cast<size_t>(J.size()))
            throw std::invalid_argument("jacobian buffer too small");
        size_t at = 0;
        for (Eigen::Index r = 0; r < J.rows(); ++r)
            for (Eigen::Index c = 0; c < J.cols(); ++c) jac[at++] = J(r, c);
        return SS_OK;
    });
}

ss_status ss_graph_build(const ss_model* m, const ss_dataset* d, int k_g, int weight_by_ambient,
                         ss_graph** out) {
    if (auto s = require(m && d && out, "null argument")) return s;
    return guarded([&] {
        *out = new ss_graph{build_graph(*m->model, d->ds, k_g, weight_by_ambient != 0)};
        return SS_OK;
    });
}

ss_status ss_graph_load(const char* path, ss_graph** out) {
    if (auto s = require(path && out, "path/out is null")) return s;
    return guarded([&] {
        *out = new ss_graph{load_graph(path)};
        return SS_OK;
    });
}

ss_status ss_graph_save(const ss_graph* g, const char* path) {
    if (auto s = require(g && path, "graph/path is null")) return s;
    return guarded([&] {
        save_graph(g->graph, path);
        return SS_OK;
    });
}

ss_status ss_graph_size(const ss_graph* g, size_t* out) {
    if (auto s = require(g && out, "graph/out is null")) return s;
    *out = static_cast<size_t>(g->graph.size());
    return SS_OK;
}

ss_status ss_graph_set_k_classify(ss_graph* g, int k) {
    if (auto s = require(g != nullptr, "graph is null")) return s;
    return guarded([&] {
        g->graph.set_k_classify(k);
        return SS_OK;
    });
}

ss_status ss_graph_classify(const ss_graph* g, const double* z, size_t z_len, char* label,
                            size_t label_len) {
    if (auto s = require(g && z, "null argument")) return s;
    return guarded([&] {
        Vector code(z_len);
        for (size_t i = 0; i < z_len; ++i) code[i] = z[i];
        return copy_string(g->graph.knn_classify(code).label, label, label_len);
    });
}

ss_status ss_graph_select_k_cv(const ss_graph* g, const int* ks, size_t n_ks, int folds,
                               uint64_t seed, double* err_out, int* best_k) {
    if (auto s = require(g && ks && err_out && best_k, "null argument")) return s;
    return guarded([&] {
        Matrix latents(g->graph.size(), g->graph.latent_dim());
        std::vector<std::optional<std::string>> labels(g->graph.size());
        for (int i = 0; i < g->graph.size(); ++i) {
            latents.row(i) = g->graph.nodes()[i].z.transpose();
            labels[i] = g->graph.nodes()[i].label;
        }
        const CvResult cv = select_k_cv(latents, labels, std::vector<int>(ks, ks + n_ks), folds,
                                        seed);
        for (size_t i = 0; i < n_ks; ++i) err_out[i] = cv.mean_error[i];
        *best_k = cv.best_k;
        return SS_OK;
    });
}

void ss_graph_free(ss_graph* g) { delete g; }

void ss_geodesic_config_defaults(ss_geodesic_config* cfg) {
    if (!cfg) return;
    const GeodesicConfig gc;
    cfg->learning_rate = gc.learning_rate;
    cfg->tolerance = gc.tolerance;
    cfg->max_iterations = gc.max_iterations;
    cfg->segments = gc.segments;
    cfg->jacobi_updates = gc.jacobi_updates ? 1 : 0;
}

ss_status ss_geodesic(const ss_model* m, const double* z0, const double* z1, size_t z_len,
                      const ss_geodesic_config* cfg, double* nodes, size_t nodes_len,
                      ss_geodesic_report* report, double* energy_log, size_t energy_log_cap,
                      size_t* energy_log_len) {
    if (auto s = require(m && z0 && z1 && nodes, "null argument")) return s;
    return guarded([&] {
        if (z_len != static_cast<size_t>(m->model->latent_dim()))
            throw std::invalid_argument("latent length mismatch");
        Vector a(z_len), b(z_len);
        for (size_t i = 0; i < z_len; ++i) {
            a[i] = z0[i];
            b[i] = z1[i];
        }
        const GeodesicConfig gc = to_core(cfg);
        auto [curve, rep] = geodesic_path(*m->model, a, b, gc);
        if (nodes_len < static_cast<size_t>(curve.nodes.size()))
            throw std::invalid_argument("node buffer too small");
        size_t at = 0;
        for (Eigen::Index r = 0; r < curve.nodes.rows(); ++r)
            for (Eigen::Index c = 0; c < curve.nodes.cols(); ++c) nodes[at++] = curve.nodes(r, c);
        fill_report(rep, report);
        if (energy_log) {
            const size_t n = std::min(energy_log_cap, rep.energy_log.size());
            for (size_t i = 0; i < n; ++i) energy_log[i] = rep.energy_log[i];
            if (energy_log_len) *energy_log_len = n;
        }
        if (rep.diverged) return fail(SS_ERR_RUNTIME, "geodesic optimization diverged");
        return SS_OK;
    });
}

ss_status ss_curve_arc_length(const ss_model* m, const double* nodes, size_t n_nodes,
                              size_t latent_dim, double* out) {
    if (auto s = require(m && nodes && out, "null argument")) return s;
    return guarded([&] {
        if (latent_dim != static_cast<size_t>(m->model->latent_dim()))
            throw std::invalid_argument("latent length mismatch");
        if (n_nodes < 2) throw std::invalid_argument("need at least 2 nodes");
        LatentCurve curve;
        curve.nodes.resize(n_nodes, latent_dim);
        size_t at = 0;
        for (size_t r = 0; r < n_nodes; ++r)
            for (size_t c = 0; c < latent_dim; ++c) curve.nodes(r, c) = nodes[at++];
        *out = manifold_arc_length(*m->model, curve);
        return SS_OK;
    });
}

ss_status ss_plan(const ss_graph* g, const ss_model* m, const ss_dataset* d_from, size_t i_from,
                  const ss_dataset* d_to, size_t i_to, int n_steps,
                  const ss_geodesic_config* cfg, ss_trace** out_shortest, ss_trace** out_linear,
                  ss_trace** out_geodesic) {
    if (auto s = require(g && m && d_from && d_to, "null argument")) return s;
    return guarded([&] {
        const Vector x0 = model_features_for_shape(*m->model, d_from->ds, i_from);
        const Vector x1 = model_features_for_shape(*m->model, d_to->ds, i_to);
        PlanResult plan = plan_shape_path(g->graph, *m->model, x0, x1, n_steps, to_core(cfg));
        const FeatureSpace& space = m->model->feature_space();
        if (out_shortest) *out_shortest = wrap_trace(std::move(plan.shortest_path), space);
        if (out_linear) *out_linear = wrap_trace(std::move(plan.linear), space);
        if (out_geodesic) *out_geodesic = wrap_trace(std::move(plan.geodesic), space);
        return SS_OK;
    });
}

ss_status ss_sweep(const ss_model* m, const ss_graph* g_or_null, const ss_dataset* d,
                   size_t index, int dim, double delta, int n_steps,
                   const ss_geodesic_config* cfg, ss_trace** out) {
    if (auto s = require(m && d && out, "null argument")) return s;
    return guarded([&] {
        const Vector x0 = model_features_for_shape(*m->model, d->ds, index);
        DeformationTrace trace =
            semantic_feature_sweep(*m->model, x0, dim, delta, n_steps, to_core(cfg),
                                   g_or_null ? &g_or_null->graph : nullptr);
        *out = wrap_trace(std::move(trace), m->model->feature_space());
        return SS_OK;
    });
}

ss_status ss_trace_load(const char* path, ss_trace** out) {
    if (auto s = require(path && out, "path/out is null")) return s;
    return guarded([&] {
        LoadedTrace loaded = load_trace(path);
        *out = wrap_trace(std::move(loaded.trace), loaded.space);
        return SS_OK;
    });
}

ss_status ss_trace_save(const ss_trace* t, const char* path) {
    if (auto s = require(t && path, "trace/path is null")) return s;
    return guarded([&] {
        save_trace(t->trace, t->space, path);
        return SS_OK;
    });
}

ss_status ss_trace_node_count(const ss_trace* t, size_t* out) {
    if (auto s = require(t && out, "trace/out is null")) return s;
    *out = t->trace.nodes.size();
    return SS_OK;
}

ss_status ss_trace_arc_length(const ss_trace* t, double* out) {
    if (auto s = require(t && out, "trace/out is null")) return s;
    *out = t->trace.arc_length_manifold;
    return SS_OK;
}

ss_status ss_trace_itinerary(const ss_trace* t, const ss_graph* g, char* buf, size_t buf_len) {
    if (auto s = require(t && g, "trace/graph is null")) return s;
    return guarded([&] {
        const auto labels = trace_labels(t->trace, g->graph);
        std::string joined;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (i) joined += ">";
            joined += labels[i];
        }
        return copy_string(joined, buf, buf_len);
    });
}

ss_status ss_trace_render_svg(const ss_trace* t, const char* path) {
    if (auto s = require(t && path, "trace/path is null")) return s;
    return guarded([&] {
        render_trace_svg(t->trace, t->space, path);
        return SS_OK;
    });
}

void ss_trace_free(ss_trace* t) { delete t; }

}  // extern "C"
