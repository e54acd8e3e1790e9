/* softshape: latent shape representation, geodesic interpolation, and
 * semantic deformation planning for deformable objects.
 *
 * C API of the shared library. All functions return SS_OK (0) on success;
 * on failure they return a nonzero status and ss_last_error() describes the
 * problem (the message is thread-local). Handles are opaque and owned by
 * the caller; release them with the matching *_free function.
 */
#ifndef SOFTSHAPE_H
#define SOFTSHAPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SOFTSHAPE_API __declspec(dllexport)
#else
#define SOFTSHAPE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ss_status {
    SS_OK = 0,
    SS_ERR_INVALID_ARGUMENT = 1,
    SS_ERR_IO = 2,
    SS_ERR_RUNTIME = 3,
    SS_ERR_BUFFER_TOO_SMALL = 4
} ss_status;

typedef struct ss_dataset ss_dataset;
typedef struct ss_model ss_model;
typedef struct ss_graph ss_graph;
typedef struct ss_trace ss_trace;

SOFTSHAPE_API const char* ss_version(void);
SOFTSHAPE_API const char* ss_last_error(void);

/* ------------------------------------------------------------------ */
/* datasets                                                            */

/* Seven-class synthetic bar dataset (markers). */
SOFTSHAPE_API ss_status ss_dataset_generate_bars(int per_class, int q, uint64_t seed,
                                                 ss_dataset** out);
/* Nine-class synthetic sheet dataset (clouds); resample_to == 0 keeps the
 * raw sampling resolution. */
SOFTSHAPE_API ss_status ss_dataset_generate_sheets(int per_class, int n_raw, int resample_to,
                                                   uint64_t seed, ss_dataset** out);
SOFTSHAPE_API ss_status ss_dataset_load(const char* path, ss_dataset** out);
SOFTSHAPE_API ss_status ss_dataset_save(const ss_dataset* d, const char* path,
                                        int binary_sidecar);
SOFTSHAPE_API ss_status ss_dataset_export_csv(const ss_dataset* d, const char* path);
SOFTSHAPE_API ss_status ss_dataset_size(const ss_dataset* d, size_t* out);
/* 0 = markers, 1 = cloud */
SOFTSHAPE_API ss_status ss_dataset_kind(const ss_dataset* d, int* out);
SOFTSHAPE_API ss_status ss_dataset_label(const ss_dataset* d, size_t index, char* buf,
                                         size_t buf_len);
SOFTSHAPE_API void ss_dataset_free(ss_dataset* d);

/* ------------------------------------------------------------------ */
/* descriptors                                                         */

/* Writes one flattened Fourier descriptor per shape (3 + 6N columns,
 * label last) to a CSV file. Marker datasets only. */
SOFTSHAPE_API ss_status ss_fit_fourier_csv(const ss_dataset* d, int harmonics,
                                           const char* out_csv);

/* Symmetric sum of squared nearest-neighbor distances between two point
 * sets given as interleaved xyz triples. */
SOFTSHAPE_API ss_status ss_chamfer_distance(const double* xyz_a, size_t n_a, const double* xyz_b,
                                            size_t n_b, double* out);

/* Greedy farthest-point subsample: writes n_out selected points (selection
 * order) into out_xyz (3*n_out doubles). */
SOFTSHAPE_API ss_status ss_farthest_point_sample(const double* xyz, size_t n, size_t n_out,
                                                 double* out_xyz);

/* ------------------------------------------------------------------ */
/* models                                                              */

typedef struct ss_train_config {
    int epochs;
    int batch_size;
    double learning_rate;
    int optimizer; /* 0 sgd, 1 sgd-momentum, 2 adam */
    uint64_t seed;
    double val_fraction;
    int loss; /* 0 mse, 1 chamfer */
} ss_train_config;

SOFTSHAPE_API void ss_train_config_defaults(ss_train_config* cfg);

/* PCA on marker data. use_fourier selects Fourier coefficient features with
 * the given harmonic count; k == 0 keeps every recoverable component. */
SOFTSHAPE_API ss_status ss_fit_pca(const ss_dataset* d, int k, int use_fourier, int harmonics,
                                   ss_model** out);

/* Trains an autoencoder preset: arch 0 = marker (latent k, default 4),
 * 1 = cloud (resolution-sized, latent 64), 2 = marker-smooth (tanh encoder).
 * The dataset is min-max normalized to [0.1, 0.9] internally. */
SOFTSHAPE_API ss_status ss_train_autoencoder(const ss_dataset* d, int arch, int latent,
                                             int resolution, const ss_train_config* cfg,
                                             ss_model** out);

SOFTSHAPE_API ss_status ss_model_load(const char* path, ss_model** out);
SOFTSHAPE_API ss_status ss_model_save(const ss_model* m, const char* path);
/* 0 = pca, 1 = autoencoder */
SOFTSHAPE_API ss_status ss_model_kind(const ss_model* m, int* out);
SOFTSHAPE_API ss_status ss_model_latent_dim(const ss_model* m, int* out);
SOFTSHAPE_API ss_status ss_model_feature_dim(const ss_model* m, int* out);
SOFTSHAPE_API ss_status ss_model_explained_variance(const ss_model* m, int k, double* out);
SOFTSHAPE_API void ss_model_free(ss_model* m);

/* Encode dataset shape i (features converted to the model's feature space
 * automatically). z must hold latent_dim doubles. */
SOFTSHAPE_API ss_status ss_model_encode_shape(const ss_model* m, const ss_dataset* d,
                                              size_t index, double* z, size_t z_len);
/* Encode every shape; z must hold size*latent_dim doubles (row-major). */
SOFTSHAPE_API ss_status ss_model_encode_dataset(const ss_model* m, const ss_dataset* d, double* z,
                                                size_t z_len);
/* Decode + denormalize a latent code into raw feature space. */
SOFTSHAPE_API ss_status ss_model_reconstruct(const ss_model* m, const double* z, size_t z_len,
                                             double* features, size_t features_len);
/* Decoder Jacobian at z, row-major ambient_dim x latent_dim. */
SOFTSHAPE_API ss_status ss_model_decoder_jacobian(const ss_model* m, const double* z,
                                                  size_t z_len, double* jac, size_t jac_len);

/* ------------------------------------------------------------------ */
/* shape graph                                                         */

/* Builds the latent kNN graph; disconnected cluster islands are bridged
 * through their closest node pairs so planning spans the dataset. */
SOFTSHAPE_API ss_status ss_graph_build(const ss_model* m, const ss_dataset* d, int k_g,
                                       int weight_by_ambient, ss_graph** out);
SOFTSHAPE_API ss_status ss_graph_load(const char* path, ss_graph** out);
SOFTSHAPE_API ss_status ss_graph_save(const ss_graph* g, const char* path);
SOFTSHAPE_API ss_status ss_graph_size(const ss_graph* g, size_t* out);
SOFTSHAPE_API ss_status ss_graph_set_k_classify(ss_graph* g, int k);
SOFTSHAPE_API ss_status ss_graph_classify(const ss_graph* g, const double* z, size_t z_len,
                                          char* label, size_t label_len);
/* 5-fold style CV over the graph's labeled nodes; err_out holds one mean
 * misclassification rate per candidate k. */
SOFTSHAPE_API ss_status ss_graph_select_k_cv(const ss_graph* g, const int* ks, size_t n_ks,
                                             int folds, uint64_t seed, double* err_out,
                                             int* best_k);
SOFTSHAPE_API void ss_graph_free(ss_graph* g);

/* ------------------------------------------------------------------ */
/* geodesics, planning, sweeps                                         */

typedef struct ss_geodesic_config {
    double learning_rate;
    double tolerance;
    int max_iterations;
    int segments;
    int jacobi_updates;
} ss_geodesic_config;

typedef struct ss_geodesic_report {
    int converged;
    int diverged;
    int iterations;
    double initial_energy;
    double final_energy;
    double final_gradient_norm_sq;
} ss_geodesic_report;

SOFTSHAPE_API void ss_geodesic_config_defaults(ss_geodesic_config* cfg);

/* Discrete geodesic between two latent codes; nodes must hold
 * (segments+1)*latent_dim doubles (row-major). energy_log (optional)
 * receives the energy after each accepted iteration. */
SOFTSHAPE_API ss_status ss_geodesic(const ss_model* m, const double* z0, const double* z1,
                                    size_t z_len, const ss_geodesic_config* cfg, double* nodes,
                                    size_t nodes_len, ss_geodesic_report* report,
                                    double* energy_log, size_t energy_log_cap,
                                    size_t* energy_log_len);

/* Decoded (manifold) arc length of an arbitrary latent node sequence,
 * row-major n_nodes x latent_dim. */
SOFTSHAPE_API ss_status ss_curve_arc_length(const ss_model* m, const double* nodes,
                                            size_t n_nodes, size_t latent_dim, double* out);

/* Latent shape planning between two dataset shapes: emits the dataset
 * shortest-path trace, the linear-interpolation trace, and the geodesic
 * trace. Any of the three outputs may be NULL. */
SOFTSHAPE_API ss_status ss_plan(const ss_graph* g, const ss_model* m, const ss_dataset* d_from,
                                size_t i_from, const ss_dataset* d_to, size_t i_to, int n_steps,
                                const ss_geodesic_config* cfg, ss_trace** out_shortest,
                                ss_trace** out_linear, ss_trace** out_geodesic);

/* Semantic feature sweep of latent dimension p around dataset shape i
 * (both directions, n_steps each). The graph is optional (labels). */
SOFTSHAPE_API ss_status ss_sweep(const ss_model* m, const ss_graph* g_or_null,
                                 const ss_dataset* d, size_t index, int dim, double delta,
                                 int n_steps, const ss_geodesic_config* cfg, ss_trace** out);

SOFTSHAPE_API ss_status ss_trace_load(const char* path, ss_trace** out);
SOFTSHAPE_API ss_status ss_trace_save(const ss_trace* t, const char* path);
SOFTSHAPE_API ss_status ss_trace_node_count(const ss_trace* t, size_t* out);
SOFTSHAPE_API ss_status ss_trace_arc_length(const ss_trace* t, double* out);
/* Collapsed kNN label itinerary, labels joined by '>'. */
SOFTSHAPE_API ss_status ss_trace_itinerary(const ss_trace* t, const ss_graph* g, char* buf,
                                           size_t buf_len);
SOFTSHAPE_API ss_status ss_trace_render_svg(const ss_trace* t, const char* path);
SOFTSHAPE_API void ss_trace_free(ss_trace* t);

#ifdef __cplusplus
}
#endif

#endif /* SOFTSHAPE_H */
