// softshape command-line tool. Links the C API of the shared library; all
// domain work happens behind softshape/softshape.h.

#include <softshape/softshape.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

void check(ss_status status, const std::string& what) {
    if (status != SS_OK) throw std::runtime_error(what + ": " + ss_last_error());
}

template <typename T, void (*Free)(T*)>
struct Handle {
    T* ptr = nullptr;
    Handle() = default;
    Handle(const Handle&) = delete;
    Handle& operator=(const Handle&) = delete;
    ~Handle() {
        if (ptr) Free(ptr);
    }
    T** out() { return &ptr; }
    operator T*() const { return ptr; }
    operator const T*() const { return ptr; }
};

using DatasetH = Handle<ss_dataset, ss_dataset_free>;
using ModelH = Handle<ss_model, ss_model_free>;
using GraphH = Handle<ss_graph, ss_graph_free>;
using TraceH = Handle<ss_trace, ss_trace_free>;

std::string fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "unreadable";
    std::uint64_t h = 1469598103934665603ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

// Every run records how its outputs were produced.
void write_manifest(const std::string& subcommand, const json& params,
                    const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
    if (outputs.empty()) return;
    json m;
    m["tool"] = "softshape";
    m["version"] = ss_version();
    m["subcommand"] = subcommand;
    m["params"] = params;
    json in = json::object();
    for (const auto& p : inputs) in[p] = fnv1a_file(p);
    m["inputs"] = std::move(in);
    m["outputs"] = outputs;
    std::ofstream out(outputs.front() + ".manifest.json");
    out << m.dump(1, '\t') << "\n";
}

std::vector<double> read_numbers_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<double> values;
    std::string cell;
    while (in) {
        const int c = in.peek();
        if (c == EOF) break;
        if (c == ',' || c == '\n' || c == '\r' || c == ' ' || c == '\t') {
            in.get();
            continue;
        }
        double v;
        if (!(in >> v)) throw std::runtime_error("malformed number in " + path);
        values.push_back(v);
    }
    return values;
}

void write_numbers_csv(const std::vector<double>& values, size_t cols, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[32];
    for (size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
        out << buf << (((i + 1) % cols == 0) ? "\n" : ",");
    }
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos) return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stoi(tok));
    }
    return out;
}

struct GeodesicFlags {
    double alpha = 0.0;  // 0 keeps defaults
    double tolerance = 0.0;
    int max_iterations = 0;
    int segments = 0;
    bool jacobi = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--alpha", alpha, "geodesic step size");
        cmd->add_option("--tol", tolerance, "geodesic convergence tolerance");
        cmd->add_option("--max-iter", max_iterations, "geodesic iteration cap");
        cmd->add_flag("--jacobi", jacobi, "simultaneous node updates");
    }

    ss_geodesic_config resolve(int steps) const {
        ss_geodesic_config cfg;
        ss_geodesic_config_defaults(&cfg);
        if (alpha > 0) cfg.learning_rate = alpha;
        if (tolerance > 0) cfg.tolerance = tolerance;
        if (max_iterations > 0) cfg.max_iterations = max_iterations;
        if (steps > 0) cfg.segments = steps;
        cfg.jacobi_updates = jacobi ? 1 : 0;
        return cfg;
    }
};

int run_cli(int argc, char** argv) {
    CLI::App app{"latent shape representation, geodesic interpolation, and deformation planning"};
    app.require_subcommand(1);

    // ---------------- gen-data ----------------
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic shape dataset");
    std::string gen_kind = "bar", gen_out, gen_csv;
    int per_class = 50, gen_q = 8, n_raw = 2048, resample = 0;
    std::uint64_t gen_seed = 0;
    bool gen_binary = false;
    gen->add_option("--kind", gen_kind, "bar|sheet")->check(CLI::IsMember({"bar", "sheet"}));
    gen->add_option("--per-class", per_class, "shapes per category")->required();
    gen->add_option("--seed", gen_seed, "rng seed (default 0)");
    gen->add_option("--out", gen_out, "output dataset JSON")->required();
    gen->add_option("--q", gen_q, "markers per bar shape");
    gen->add_option("--n-raw", n_raw, "raw points per sheet cloud");
    gen->add_option("--resample", resample, "farthest-point resample clouds to this size");
    gen->add_flag("--binary", gen_binary, "store cloud points in a float32 sidecar");
    gen->add_option("--csv", gen_csv, "also export features to CSV");
    gen->callback([&] {
        DatasetH ds;
        if (gen_kind == "bar")
            check(ss_dataset_generate_bars(per_class, gen_q, gen_seed, ds.out()), "gen-data");
        else
            check(ss_dataset_generate_sheets(per_class, n_raw, resample, gen_seed, ds.out()),
                  "gen-data");
        check(ss_dataset_save(ds, gen_out.c_str(), gen_binary ? 1 : 0), "save dataset");
        std::vector<std::string> outputs{gen_out};
        if (!gen_csv.empty()) {
            check(ss_dataset_export_csv(ds, gen_csv.c_str()), "export csv");
            outputs.push_back(gen_csv);
        }
        size_t n = 0;
        ss_dataset_size(ds, &n);
        std::cout << "wrote " << n << " shapes to " << gen_out << "\n";
        write_manifest("gen-data",
                       json{{"kind", gen_kind}, {"per_class", per_class}, {"seed", gen_seed},
                            {"q", gen_q},       {"n_raw", n_raw},         {"resample", resample}},
                       {}, outputs);
    });

    // ---------------- fit-fourier ----------------
    auto* ff = app.add_subcommand("fit-fourier", "fit 3D Fourier descriptors to marker shapes");
    std::string ff_in, ff_out;
    int ff_harmonics = 8;
    ff->add_option("--in", ff_in, "marker dataset JSON")->required();
    ff->add_option("--harmonics", ff_harmonics, "harmonic count N")->required();
    ff->add_option("--out", ff_out, "descriptor CSV (one row per shape)")->required();
    ff->callback([&] {
        DatasetH ds;
        check(ss_dataset_load(ff_in.c_str(), ds.out()), "load dataset");
        check(ss_fit_fourier_csv(ds, ff_harmonics, ff_out.c_str()), "fit-fourier");
        write_manifest("fit-fourier", json{{"harmonics", ff_harmonics}}, {ff_in}, {ff_out});
    });

    // ---------------- fit-pca ----------------
    auto* fp = app.add_subcommand("fit-pca", "fit a PCA latent model");
    std::string fp_in, fp_out, fp_features = "raw";
    int fp_harmonics = 8, fp_latent = 4;
    fp->add_option("--in", fp_in, "marker dataset JSON")->required();
    fp->add_option("--features", fp_features, "raw|fourier")
        ->check(CLI::IsMember({"raw", "fourier"}));
    fp->add_option("--harmonics", fp_harmonics, "harmonics for fourier features");
    fp->add_option("--latent", fp_latent, "retained components k");
    fp->add_option("--out", fp_out, "model checkpoint JSON")->required();
    fp->callback([&] {
        DatasetH ds;
        check(ss_dataset_load(fp_in.c_str(), ds.out()), "load dataset");
        ModelH model;
        check(ss_fit_pca(ds, fp_latent, fp_features == "fourier" ? 1 : 0, fp_harmonics,
                         model.out()),
              "fit-pca");
        check(ss_model_save(model, fp_out.c_str()), "save model");
        double vexp = 0.0;
        check(ss_model_explained_variance(model, fp_latent, &vexp), "explained variance");
        std::cout << "explained variance at k=" << fp_latent << ": " << vexp << "\n";
        write_manifest("fit-pca",
                       json{{"features", fp_features},
                            {"harmonics", fp_harmonics},
                            {"latent", fp_latent},
                            {"explained_variance", vexp}},
                       {fp_in}, {fp_out});
    });

    // ---------------- train-ae ----------------
    auto* ta = app.add_subcommand("train-ae", "train an autoencoder latent model");
    std::string ta_in, ta_out, ta_arch = "marker", ta_loss, ta_opt = "adam";
    int ta_latent = 0, ta_resolution = 512, ta_epochs = 200, ta_batch = 32;
    double ta_lr = 1e-3, ta_val = 0.1;
    std::uint64_t ta_seed = 0;
    ta->add_option("--in", ta_in, "dataset JSON")->required();
    ta->add_option("--arch", ta_arch, "marker|cloud|marker-smooth")
        ->check(CLI::IsMember({"marker", "cloud", "marker-smooth"}));
    ta->add_option("--latent", ta_latent, "bottleneck size (marker presets)");
    ta->add_option("--resolution", ta_resolution, "cloud resolution N");
    ta->add_option("--epochs", ta_epochs, "training epochs")->required();
    ta->add_option("--seed", ta_seed, "rng seed (default 0)");
    ta->add_option("--batch", ta_batch, "minibatch size");
    ta->add_option("--lr", ta_lr, "learning rate");
    ta->add_option("--optimizer", ta_opt, "sgd|sgd-momentum|adam")
        ->check(CLI::IsMember({"sgd", "sgd-momentum", "adam"}));
    ta->add_option("--loss", ta_loss, "mse|chamfer (default by arch)")
        ->check(CLI::IsMember({"mse", "chamfer"}));
    ta->add_option("--val-frac", ta_val, "validation fraction");
    ta->add_option("--out", ta_out, "model checkpoint JSON")->required();
    ta->callback([&] {
        DatasetH ds;
        check(ss_dataset_load(ta_in.c_str(), ds.out()), "load dataset");
        ss_train_config cfg;
        ss_train_config_defaults(&cfg);
        cfg.epochs = ta_epochs;
        cfg.batch_size = ta_batch;
        cfg.learning_rate = ta_lr;
        cfg.optimizer = ta_opt == "sgd" ? 0 : (ta_opt == "sgd-momentum" ? 1 : 2);
        cfg.seed = ta_seed;
        cfg.val_fraction = ta_val;
        const int arch = ta_arch == "marker" ? 0 : (ta_arch == "cloud" ? 1 : 2);
        if (ta_loss.empty()) ta_loss = (arch == 1) ? "chamfer" : "mse";
        cfg.loss = ta_loss == "chamfer" ? 1 : 0;
        ModelH model;
        check(ss_train_autoencoder(ds, arch, ta_latent, ta_resolution, &cfg, model.out()),
              "train-ae");
        check(ss_model_save(model, ta_out.c_str()), "save model");
        std::cout << "trained " << ta_arch << " model -> " << ta_out << "\n";
        write_manifest("train-ae",
                       json{{"arch", ta_arch},   {"latent", ta_latent}, {"epochs", ta_epochs},
                            {"batch", ta_batch}, {"lr", ta_lr},         {"optimizer", ta_opt},
                            {"loss", ta_loss},   {"val_frac", ta_val},  {"seed", ta_seed},
                            {"resolution", ta_resolution}},
                       {ta_in}, {ta_out});
    });

    // ---------------- build-graph ----------------
    auto* bg = app.add_subcommand("build-graph", "build the latent kNN shape graph");
    std::string bg_model, bg_in, bg_out;
    int bg_kg = 6, bg_kc = 0;
    bool bg_ambient = false;
    bg->add_option("--model", bg_model, "model checkpoint")->required();
    bg->add_option("--in", bg_in, "dataset JSON")->required();
    bg->add_option("--kg", bg_kg, "neighbors per node (default 6)");
    bg->add_option("--k-classify", bg_kc, "default classification k");
    bg->add_flag("--ambient-weights", bg_ambient, "weight edges by decoded distance");
    bg->add_option("--out", bg_out, "graph JSON")->required();
    bg->callback([&] {
        ModelH model;
        DatasetH ds;
        check(ss_model_load(bg_model.c_str(), model.out()), "load model");
        check(ss_dataset_load(bg_in.c_str(), ds.out()), "load dataset");
        GraphH graph;
        check(ss_graph_build(model, ds, bg_kg, bg_ambient ? 1 : 0, graph.out()), "build-graph");
        if (bg_kc > 0) check(ss_graph_set_k_classify(graph.ptr, bg_kc), "set k");
        check(ss_graph_save(graph, bg_out.c_str()), "save graph");
        write_manifest("build-graph",
                       json{{"kg", bg_kg}, {"k_classify", bg_kc}, {"ambient", bg_ambient}},
                       {bg_model, bg_in}, {bg_out});
    });

    // ---------------- classify ----------------
    auto* cl = app.add_subcommand("classify",
                                  "kNN-classify shapes in latent space / select k by CV");
    std::string cl_model, cl_graph, cl_in, cl_out, cl_select, cl_curve;
    int cl_k = 0, cl_folds = 5;
    std::uint64_t cl_seed = 0;
    cl->add_option("--model", cl_model, "model checkpoint");
    cl->add_option("--graph", cl_graph, "graph JSON")->required();
    cl->add_option("--in", cl_in, "dataset JSON to classify");
    cl->add_option("--k", cl_k, "neighbors (default: graph's)");
    cl->add_option("--out", cl_out, "prediction CSV (index,predicted,truth,z...)");
    cl->add_option("--select-k", cl_select, "candidate ks, e.g. 1,3,5,9");
    cl->add_option("--folds", cl_folds, "CV folds (default 5)");
    cl->add_option("--seed", cl_seed, "CV shuffle seed");
    cl->add_option("--curve-out", cl_curve, "CV error curve CSV");
    cl->callback([&] {
        GraphH graph;
        check(ss_graph_load(cl_graph.c_str(), graph.out()), "load graph");
        if (!cl_select.empty()) {
            const std::vector<int> ks = parse_int_list(cl_select);
            if (ks.empty()) throw CLI::ValidationError("--select-k", "empty candidate list");
            std::vector<double> errs(ks.size());
            int best = 0;
            check(ss_graph_select_k_cv(graph, ks.data(), ks.size(), cl_folds, cl_seed,
                                       errs.data(), &best),
                  "select-k");
            std::cout << "best k = " << best << "\n";
            std::vector<std::string> outputs;
            if (!cl_curve.empty()) {
                std::ofstream out(cl_curve);
                out << "k,cv_error\n";
                for (std::size_t i = 0; i < ks.size(); ++i)
                    out << ks[i] << "," << errs[i] << "\n";
                outputs.push_back(cl_curve);
            }
            write_manifest("classify",
                           json{{"select_k", cl_select},
                                {"folds", cl_folds},
                                {"seed", cl_seed},
                                {"best_k", best}},
                           {cl_graph}, outputs);
            return;
        }
        if (cl_model.empty() || cl_in.empty() || cl_out.empty())
            throw CLI::ValidationError("classify",
                                       "--model, --in and --out are required without --select-k");
        ModelH model;
        DatasetH ds;
        check(ss_model_load(cl_model.c_str(), model.out()), "load model");
        check(ss_dataset_load(cl_in.c_str(), ds.out()), "load dataset");
        if (cl_k > 0) check(ss_graph_set_k_classify(graph.ptr, cl_k), "set k");
        size_t n = 0;
        int k_dim = 0;
        check(ss_dataset_size(ds, &n), "size");
        check(ss_model_latent_dim(model, &k_dim), "latent dim");
        std::vector<double> z(static_cast<size_t>(n) * k_dim);
        check(ss_model_encode_dataset(model, ds, z.data(), z.size()), "encode");
        std::ofstream out(cl_out);
        if (!out) throw std::runtime_error("cannot write " + cl_out);
        out << "index,predicted,truth";
        for (int c = 0; c < k_dim; ++c) out << ",z" << c;
        out << "\n";
        char label[256], truth[256];
        for (size_t i = 0; i < n; ++i) {
            check(ss_graph_classify(graph, z.data() + i * k_dim, k_dim, label, sizeof(label)),
                  "classify");
            check(ss_dataset_label(ds, i, truth, sizeof(truth)), "label");
            out << i << "," << label << "," << truth;
            for (int c = 0; c < k_dim; ++c) out << "," << z[i * k_dim + c];
            out << "\n";
        }
        write_manifest("classify", json{{"k", cl_k}}, {cl_model, cl_graph, cl_in}, {cl_out});
    });

    // ---------------- sweep ----------------
    auto* sw = app.add_subcommand("sweep", "semantic feature sweep of one latent dimension");
    std::string sw_model, sw_graph, sw_in, sw_out, sw_svg;
    int sw_index = 0, sw_dim = 0, sw_steps = 5;
    double sw_step = 0.1;
    GeodesicFlags sw_geo;
    sw->add_option("--model", sw_model, "model checkpoint")->required();
    sw->add_option("--graph", sw_graph, "graph JSON for label predictions");
    sw->add_option("--in", sw_in, "dataset JSON with the base shape")->required();
    sw->add_option("--index", sw_index, "base shape index (default 0)");
    sw->add_option("--dim", sw_dim, "latent dimension p")->required();
    sw->add_option("--step", sw_step, "step delta")->required();
    sw->add_option("--steps", sw_steps, "steps in each direction");
    sw->add_option("--out", sw_out, "trace JSON")->required();
    sw->add_option("--svg", sw_svg, "small-multiples SVG");
    sw_geo.attach(sw);
    sw->callback([&] {
        ModelH model;
        DatasetH ds;
        GraphH graph;
        check(ss_model_load(sw_model.c_str(), model.out()), "load model");
        check(ss_dataset_load(sw_in.c_str(), ds.out()), "load dataset");
        if (!sw_graph.empty()) check(ss_graph_load(sw_graph.c_str(), graph.out()), "load graph");
        const ss_geodesic_config cfg = sw_geo.resolve(0);
        TraceH trace;
        check(ss_sweep(model, graph.ptr, ds, sw_index, sw_dim, sw_step, sw_steps, &cfg,
                       trace.out()),
              "sweep");
        check(ss_trace_save(trace, sw_out.c_str()), "save trace");
        std::vector<std::string> outputs{sw_out};
        if (!sw_svg.empty()) {
            check(ss_trace_render_svg(trace, sw_svg.c_str()), "render svg");
            outputs.push_back(sw_svg);
        }
        write_manifest("sweep",
                       json{{"index", sw_index}, {"dim", sw_dim}, {"step", sw_step},
                            {"steps", sw_steps}},
                       {sw_model, sw_in}, outputs);
    });

    // ---------------- plan ----------------
    auto* pl = app.add_subcommand("plan", "latent shape planning between two shapes");
    std::string pl_model, pl_graph, pl_from, pl_to, pl_out, pl_svg;
    int pl_from_idx = 0, pl_to_idx = 0, pl_steps = 16;
    GeodesicFlags pl_geo;
    pl->add_option("--model", pl_model, "model checkpoint")->required();
    pl->add_option("--graph", pl_graph, "graph JSON")->required();
    pl->add_option("--from", pl_from, "dataset JSON holding the current shape")->required();
    pl->add_option("--from-index", pl_from_idx, "shape index in --from");
    pl->add_option("--to", pl_to, "dataset JSON holding the target shape")->required();
    pl->add_option("--to-index", pl_to_idx, "shape index in --to");
    pl->add_option("--steps", pl_steps, "interpolation segments");
    pl->add_option("--out", pl_out, "geodesic trace JSON (shortest-path trace saved beside it)")
        ->required();
    pl->add_option("--svg", pl_svg, "render the geodesic trace to SVG");
    pl_geo.attach(pl);
    pl->callback([&] {
        ModelH model;
        GraphH graph;
        DatasetH from, to;
        check(ss_model_load(pl_model.c_str(), model.out()), "load model");
        check(ss_graph_load(pl_graph.c_str(), graph.out()), "load graph");
        check(ss_dataset_load(pl_from.c_str(), from.out()), "load --from");
        check(ss_dataset_load(pl_to.c_str(), to.out()), "load --to");
        const ss_geodesic_config cfg = pl_geo.resolve(pl_steps);
        TraceH sp, lin, geo;
        check(ss_plan(graph, model, from, pl_from_idx, to, pl_to_idx, pl_steps, &cfg, sp.out(),
                      lin.out(), geo.out()),
              "plan");
        const std::string sp_path = with_suffix(pl_out, ".shortest");
        check(ss_trace_save(geo, pl_out.c_str()), "save geodesic trace");
        check(ss_trace_save(sp, sp_path.c_str()), "save shortest-path trace");
        double arc_sp = 0, arc_lin = 0, arc_geo = 0;
        ss_trace_arc_length(sp, &arc_sp);
        ss_trace_arc_length(lin, &arc_lin);
        ss_trace_arc_length(geo, &arc_geo);
        std::cout << "arc length (manifold): shortest-path=" << arc_sp << " linear=" << arc_lin
                  << " geodesic=" << arc_geo << "\n";
        std::vector<std::string> outputs{pl_out, sp_path};
        if (!pl_svg.empty()) {
            check(ss_trace_render_svg(geo, pl_svg.c_str()), "render svg");
            outputs.push_back(pl_svg);
        }
        write_manifest("plan",
                       json{{"from_index", pl_from_idx},
                            {"to_index", pl_to_idx},
                            {"steps", pl_steps},
                            {"arc_shortest", arc_sp},
                            {"arc_linear", arc_lin},
                            {"arc_geodesic", arc_geo}},
                       {pl_model, pl_graph, pl_from, pl_to}, outputs);
    });

    // ---------------- geodesic ----------------
    auto* ge = app.add_subcommand("geodesic", "discrete geodesic between two latent codes");
    std::string ge_model, ge_from, ge_to, ge_out;
    int ge_segments = 16;
    GeodesicFlags ge_geo;
    ge->add_option("--model", ge_model, "model checkpoint")->required();
    ge->add_option("--from", ge_from, "CSV with the start latent code")->required();
    ge->add_option("--to", ge_to, "CSV with the end latent code")->required();
    ge->add_option("--segments", ge_segments, "segments N (default 16)");
    ge->add_option("--out", ge_out, "node CSV (energy log written beside it)")->required();
    ge_geo.attach(ge);
    ge->callback([&] {
        ModelH model;
        check(ss_model_load(ge_model.c_str(), model.out()), "load model");
        int k = 0;
        check(ss_model_latent_dim(model, &k), "latent dim");
        const std::vector<double> z0 = read_numbers_csv(ge_from);
        const std::vector<double> z1 = read_numbers_csv(ge_to);
        if (static_cast<int>(z0.size()) != k || static_cast<int>(z1.size()) != k)
            throw std::runtime_error("latent CSVs must contain exactly " + std::to_string(k) +
                                     " numbers");
        const ss_geodesic_config cfg = ge_geo.resolve(ge_segments);
        std::vector<double> nodes(static_cast<size_t>(cfg.segments + 1) * k);
        std::vector<double> energy(static_cast<size_t>(cfg.max_iterations) + 1);
        size_t energy_len = 0;
        ss_geodesic_report report;
        check(ss_geodesic(model, z0.data(), z1.data(), k, &cfg, nodes.data(), nodes.size(),
                          &report, energy.data(), energy.size(), &energy_len),
              "geodesic");
        write_numbers_csv(nodes, k, ge_out);
        const std::string energy_path = ge_out + ".energy.csv";
        {
            std::ofstream out(energy_path);
            out << "iteration,energy\n";
            for (size_t i = 0; i < energy_len; ++i) out << i << "," << energy[i] << "\n";
        }
        // Linear baseline arc length for the same endpoints.
        std::vector<double> lin(nodes.size());
        for (int i = 0; i <= cfg.segments; ++i) {
            const double t = static_cast<double>(i) / cfg.segments;
            for (int c = 0; c < k; ++c)
                lin[static_cast<size_t>(i) * k + c] = (1.0 - t) * z0[c] + t * z1[c];
        }
        double arc_geo = 0, arc_lin = 0;
        check(ss_curve_arc_length(model, nodes.data(), cfg.segments + 1, k, &arc_geo), "arc");
        check(ss_curve_arc_length(model, lin.data(), cfg.segments + 1, k, &arc_lin), "arc");
        std::cout << "converged=" << report.converged << " iterations=" << report.iterations
                  << " energy " << report.initial_energy << " -> " << report.final_energy
                  << "\narc length: linear=" << arc_lin << " geodesic=" << arc_geo << "\n";
        write_manifest("geodesic",
                       json{{"segments", cfg.segments},
                            {"converged", report.converged != 0},
                            {"iterations", report.iterations},
                            {"final_energy", report.final_energy},
                            {"arc_linear", arc_lin},
                            {"arc_geodesic", arc_geo}},
                       {ge_model, ge_from, ge_to}, {ge_out, energy_path});
    });

    // ---------------- compare-interp ----------------
    auto* ci = app.add_subcommand("compare-interp",
                                  "arc-length table: shortest path vs linear vs geodesic");
    std::string ci_model, ci_graph, ci_from, ci_to, ci_out, ci_traces;
    int ci_from_idx = 0, ci_to_idx = 0, ci_steps = 16;
    GeodesicFlags ci_geo;
    ci->add_option("--model", ci_model, "model checkpoint")->required();
    ci->add_option("--graph", ci_graph, "graph JSON")->required();
    ci->add_option("--from", ci_from, "dataset JSON with the current shape")->required();
    ci->add_option("--from-index", ci_from_idx, "shape index in --from");
    ci->add_option("--to", ci_to, "dataset JSON with the target shape")->required();
    ci->add_option("--to-index", ci_to_idx, "shape index in --to");
    ci->add_option("--steps", ci_steps, "interpolation segments");
    ci->add_option("--out", ci_out, "arc-length table CSV")->required();
    ci->add_option("--traces", ci_traces, "also save the three traces beside this base path");
    ci_geo.attach(ci);
    ci->callback([&] {
        ModelH model;
        GraphH graph;
        DatasetH from, to;
        check(ss_model_load(ci_model.c_str(), model.out()), "load model");
        check(ss_graph_load(ci_graph.c_str(), graph.out()), "load graph");
        check(ss_dataset_load(ci_from.c_str(), from.out()), "load --from");
        check(ss_dataset_load(ci_to.c_str(), to.out()), "load --to");
        const ss_geodesic_config cfg = ci_geo.resolve(ci_steps);
        TraceH sp, lin, geo;
        check(ss_plan(graph, model, from, ci_from_idx, to, ci_to_idx, ci_steps, &cfg, sp.out(),
                      lin.out(), geo.out()),
              "plan");
        double arc_sp = 0, arc_lin = 0, arc_geo = 0;
        ss_trace_arc_length(sp, &arc_sp);
        ss_trace_arc_length(lin, &arc_lin);
        ss_trace_arc_length(geo, &arc_geo);
        {
            std::ofstream out(ci_out);
            if (!out) throw std::runtime_error("cannot write " + ci_out);
            out << "method,arc_length\n";
            out << "shortest-path," << arc_sp << "\n";
            out << "linear," << arc_lin << "\n";
            out << "geodesic," << arc_geo << "\n";
        }
        std::cout << "shortest-path " << arc_sp << "\nlinear        " << arc_lin
                  << "\ngeodesic      " << arc_geo << "\n";
        std::vector<std::string> outputs{ci_out};
        if (!ci_traces.empty()) {
            for (auto [trace, name] : {std::pair<ss_trace*, const char*>{sp.ptr, ".shortest"},
                                       {lin.ptr, ".linear"},
                                       {geo.ptr, ".geodesic"}}) {
                const std::string path = with_suffix(ci_traces, name);
                check(ss_trace_save(trace, path.c_str()), "save trace");
                outputs.push_back(path);
            }
        }
        write_manifest("compare-interp",
                       json{{"steps", ci_steps},
                            {"arc_shortest", arc_sp},
                            {"arc_linear", arc_lin},
                            {"arc_geodesic", arc_geo}},
                       {ci_model, ci_graph, ci_from, ci_to}, outputs);
    });

    // ---------------- report ----------------
    auto* rp = app.add_subcommand("report", "render a trace file to SVG");
    std::string rp_trace, rp_out, rp_graph;
    rp->add_option("--trace", rp_trace, "trace JSON")->required();
    rp->add_option("--out", rp_out, "SVG path")->required();
    rp->add_option("--graph", rp_graph, "graph JSON (prints the label itinerary)");
    rp->callback([&] {
        TraceH trace;
        check(ss_trace_load(rp_trace.c_str(), trace.out()), "load trace");
        check(ss_trace_render_svg(trace, rp_out.c_str()), "render svg");
        if (!rp_graph.empty()) {
            GraphH graph;
            check(ss_graph_load(rp_graph.c_str(), graph.out()), "load graph");
            char itinerary[4096];
            check(ss_trace_itinerary(trace, graph, itinerary, sizeof(itinerary)), "itinerary");
            std::cout << "itinerary: " << itinerary << "\n";
        }
        write_manifest("report", json::object(), {rp_trace}, {rp_out});
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
