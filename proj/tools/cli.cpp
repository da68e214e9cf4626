#include "cli.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pfsc/data_io.hpp"
#include "pfsc/error.hpp"
#include "pfsc/format.hpp"
#include "pfsc/metrics.hpp"
#include "pfsc/solver.hpp"

namespace pfsc::cli {

namespace fs = std::filesystem;

namespace {

// Raised for problems with the flags themselves; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitFlags {
    std::string manifest;
    std::size_t clusters = 0;
    double alpha = 1.0;
    double beta = 1.0;
    std::size_t max_iters = 50;
    double tol = 1e-6;
    std::uint64_t seed = 0;
    std::string m_variant = "paper";
    std::string weight_schedule = "per-view";
    std::string sweep = "gauss-seidel";
    std::size_t kmeans_restarts = 10;
    bool no_row_normalize = false;
    bool no_normalize = false;
    std::string out_dir;
};

void add_fit_flags(CLI::App& cmd, FitFlags& f) {
    cmd.add_option("manifest", f.manifest, "Dataset manifest")->required();
    cmd.add_option("--clusters,-c", f.clusters, "Number of clusters")->required();
    cmd.add_option("--alpha", f.alpha, "Graph smoothness weight");
    cmd.add_option("--beta", f.beta, "Graph ridge weight");
    cmd.add_option("--max-iters", f.max_iters, "Maximum outer iterations");
    cmd.add_option("--tol", f.tol, "Relative objective change that stops the loop");
    cmd.add_option("--seed", f.seed, "Random seed");
    cmd.add_option("--m-variant", f.m_variant, "Partition update: paper or derived")
        ->check(CLI::IsMember({"paper", "derived"}));
    cmd.add_option("--weight-schedule", f.weight_schedule, "Weight update: per-view or per-pass")
        ->check(CLI::IsMember({"per-view", "per-pass"}));
    cmd.add_option("--sweep", f.sweep, "Partition sweep: gauss-seidel or jacobi")
        ->check(CLI::IsMember({"gauss-seidel", "jacobi"}));
    cmd.add_option("--kmeans-restarts", f.kmeans_restarts, "k-means restarts for label extraction");
    cmd.add_flag("--no-row-normalize", f.no_row_normalize, "Skip unit-length row scaling before k-means");
    cmd.add_flag("--no-normalize", f.no_normalize, "Skip the per-feature [-1, 1] rescaling of the input");
    cmd.add_option("--out-dir,-o", f.out_dir, "Output directory")->required();
}

HyperParams to_params(const FitFlags& f) {
    HyperParams p;
    p.alpha = f.alpha;
    p.beta = f.beta;
    p.c = f.clusters;
    p.max_outer_iters = f.max_iters;
    p.rel_obj_tol = f.tol;
    p.seed = f.seed;
    p.m_variant = f.m_variant == "derived" ? MVariant::derived : MVariant::paper;
    p.weight_schedule = f.weight_schedule == "per-pass" ? WeightSchedule::per_pass : WeightSchedule::per_view;
    p.sweep = f.sweep == "jacobi" ? PartitionSweep::jacobi : PartitionSweep::gauss_seidel;
    p.row_normalize_embedding = !f.no_row_normalize;
    p.kmeans_restarts = f.kmeans_restarts;
    return p;
}

void validate(const HyperParams& p, std::size_t n = 0) {
    try {
        p.validate(n);
    } catch (const InvalidInput& e) {
        throw UsageError(e.what());
    }
}

MultiViewDataset load_for_fit(const FitFlags& f, const HyperParams& p) {
    auto data = io::load_dataset(f.manifest);
    validate(p, data.n());
    return f.no_normalize ? data : io::normalize_dataset(data);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void print(std::ostream& out, const std::string& key, double value) {
    out << key << ',' << fmt::format_double(value) << '\n';
}

void print(std::ostream& out, const std::string& key, const std::string& value) {
    out << key << ',' << value << '\n';
}

void print_metrics(std::ostream& out, const metrics::MetricReport& r, const std::string& prefix = "") {
    print(out, prefix + "fscore", r.f_score);
    print(out, prefix + "precision", r.precision);
    print(out, prefix + "recall", r.recall);
    print(out, prefix + "nmi", r.nmi);
    print(out, prefix + "ari", r.ari);
}

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
    std::vector<double> values;
    for (auto part : fmt::split(text, ',')) {
        double x = 0.0;
        if (!fmt::parse_double(fmt::trim(part), x)) throw UsageError(flag + ": not a number: '" + std::string(part) + "'");
        values.push_back(x);
    }
    if (values.empty()) throw UsageError(flag + " is empty");
    return values;
}

// "dim[:sigma[:noise]]" entries separated by commas, e.g. "5,8:0.1,8:0.27:noise".
std::vector<io::BlobViewSpec> parse_view_specs(const std::string& text, io::CenterLayout layout) {
    std::vector<io::BlobViewSpec> specs;
    for (auto entry : fmt::split(text, ',')) {
        const auto parts = fmt::split(fmt::trim(entry), ':');
        if (parts.empty() || parts.size() > 3) throw UsageError("bad view spec '" + std::string(entry) + "'");
        io::BlobViewSpec spec;
        spec.layout = layout;
        long long dim = 0;
        if (!fmt::parse_int(parts[0], dim) || dim < 1) throw UsageError("bad view dimension in '" + std::string(entry) + "'");
        spec.dim = static_cast<std::size_t>(dim);
        if (parts.size() >= 2 && (!fmt::parse_double(parts[1], spec.noise_sigma) || !(spec.noise_sigma > 0.0))) {
            throw UsageError("bad view sigma in '" + std::string(entry) + "'");
        }
        if (parts.size() == 3) {
            if (parts[2] != "noise") throw UsageError("unknown view flag '" + std::string(parts[2]) + "'");
            spec.informative = false;
        }
        specs.push_back(spec);
    }
    if (specs.empty()) throw UsageError("no views given");
    return specs;
}

int cmd_cluster(const FitFlags& f, std::ostream& out) {
    const auto params = to_params(f);
    validate(params);
    const auto data = load_for_fit(f, params);
    const fs::path dir(f.out_dir);
    ensure_dir(dir);
    const auto result = solver::fit_with_trace_export(data, params, dir / "trace.csv");
    io::save_labels(result.labels, dir / "labels.csv");
    for (std::size_t v = 0; v < data.num_views(); ++v) {
        io::save_labels(solver::partition_labels(result, v, params), dir / ("labels_view_" + std::to_string(v + 1) + ".csv"));
    }
    io::save_weights(result.state.w, dir / "weights.csv");

    print(out, "n", std::to_string(data.n()));
    print(out, "views", std::to_string(data.num_views()));
    print(out, "iterations", std::to_string(result.trace.iters_run));
    print(out, "converged", result.trace.converged ? "true" : "false");
    print(out, "objective", result.trace.objective_per_iter.back());
    print(out, "monotonicity_violations", std::to_string(result.trace.monotonicity_violations.size()));
    for (std::size_t v = 0; v < data.num_views(); ++v) {
        print(out, "w_" + std::to_string(v + 1), result.state.w(static_cast<Eigen::Index>(v)));
    }
    if (data.labels()) print_metrics(out, metrics::evaluate_all(result.labels, Labeling::from_ids(*data.labels())));
    return 0;
}

int cmd_grid(const FitFlags& f, const std::string& alpha_list, const std::string& beta_list, std::ostream& out) {
    const auto alphas = parse_list(alpha_list, "--alpha-list");
    const auto betas = parse_list(beta_list, "--beta-list");
    auto params = to_params(f);
    for (double a : alphas) {
        for (double b : betas) {
            params.alpha = a;
            params.beta = b;
            validate(params);
        }
    }
    const auto data = load_for_fit(f, params);
    if (!data.labels()) throw InvalidInput("grid runs need ground-truth labels in the manifest");
    const auto truth = Labeling::from_ids(*data.labels());
    const fs::path dir(f.out_dir);
    ensure_dir(dir);

    Matrix rows(static_cast<Eigen::Index>(alphas.size() * betas.size()), 7);
    Eigen::Index r = 0;
    for (double a : alphas) {
        for (double b : betas) {
            params.alpha = a;
            params.beta = b;
            const auto m = metrics::evaluate_all(solver::fit(data, params).labels, truth);
            rows.row(r++) << a, b, m.f_score, m.precision, m.recall, m.nmi, m.ari;
        }
    }
    io::write_csv_matrix(rows, dir / "grid_results.csv", {"alpha", "beta", "fscore", "precision", "recall", "nmi", "ari"});
    print(out, "runs", std::to_string(rows.rows()));
    print(out, "results", (dir / "grid_results.csv").string());
    return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path, std::ostream& out) {
    const auto pred = io::load_labels(pred_path);
    const auto truth = io::load_labels(truth_path);
    print_metrics(out, metrics::evaluate_all(pred, truth));
    return 0;
}

struct CorruptFlags {
    std::string in;
    std::string out;
    std::string noise;
    double level = 0.0;
    std::uint64_t seed = 0;
    bool has_header = false;
    std::optional<double> lo;
    std::optional<double> hi;
};

int cmd_corrupt(const CorruptFlags& f, std::ostream& out) {
    io::NoiseSpec spec;
    spec.kind = f.noise == "gaussian" ? io::NoiseKind::gaussian : io::NoiseKind::salt_pepper;
    spec.level = f.level;
    spec.seed = f.seed;
    spec.lo = f.lo;
    spec.hi = f.hi;
    if (spec.kind == io::NoiseKind::gaussian && !(f.level > 0.0)) throw UsageError("--level must be > 0");
    if (spec.kind == io::NoiseKind::salt_pepper && !(f.level > 0.0 && f.level < 1.0)) {
        throw UsageError("--level must lie in (0, 1) for salt and pepper noise");
    }
    if (f.lo.has_value() != f.hi.has_value()) throw UsageError("--lo and --hi go together");
    ViewMatrix view{"input", io::read_csv_matrix(f.in, f.has_header)};
    const auto noisy = io::apply_noise(view, spec);
    io::write_csv_matrix(noisy.data, f.out);
    const auto changed = (noisy.data.array() != view.data.array()).count();
    print(out, "entries", std::to_string(view.data.size()));
    print(out, "changed", std::to_string(changed));
    print(out, "output", f.out);
    return 0;
}

struct SynthFlags {
    std::size_t clusters = 0;
    std::size_t per_cluster = 0;
    std::string views;
    double separation = 10.0;
    std::uint64_t seed = 0;
    std::string layout = "rays";
    std::string name = "synthetic";
    std::string out_dir;
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
    if (f.clusters < 1) throw UsageError("--clusters must be at least 1");
    if (f.per_cluster < 1) throw UsageError("--per-cluster must be at least 1");
    if (!(f.separation >= 0.0)) throw UsageError("--separation must be >= 0");
    const auto specs = parse_view_specs(f.views, f.layout == "box" ? io::CenterLayout::box : io::CenterLayout::rays);
    numerics::Rng rng(f.seed);
    const auto data = io::synth_blobs(f.per_cluster, f.clusters, specs, f.separation, rng);
    const auto manifest = io::save_dataset(data, f.name, f.out_dir);
    print(out, "n", std::to_string(data.n()));
    print(out, "views", std::to_string(data.num_views()));
    print(out, "manifest", manifest.string());
    return 0;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Partition fusion multi-view subspace clustering", "pfsc"};
    app.require_subcommand(1);

    FitFlags cluster_flags;
    auto* cluster = app.add_subcommand("cluster", "Fit the model and write label, weight and trace files");
    add_fit_flags(*cluster, cluster_flags);

    FitFlags grid_flags;
    std::string alpha_list, beta_list;
    auto* grid = app.add_subcommand("grid", "Fit over an (alpha, beta) grid and tabulate the metrics");
    add_fit_flags(*grid, grid_flags);
    grid->add_option("--alpha-list", alpha_list, "Comma-separated alpha values")->required();
    grid->add_option("--beta-list", beta_list, "Comma-separated beta values")->required();

    std::string pred_path, truth_path;
    auto* eval = app.add_subcommand("eval", "Score a labeling against ground truth");
    eval->add_option("--pred", pred_path, "Predicted labels file")->required();
    eval->add_option("--truth", truth_path, "Ground-truth labels file")->required();

    CorruptFlags corrupt_flags;
    double lo = 0.0, hi = 0.0;
    auto* corrupt = app.add_subcommand("corrupt", "Add gaussian or salt and pepper noise to a CSV view");
    corrupt->add_option("--in", corrupt_flags.in, "Input CSV (samples per row)")->required();
    corrupt->add_option("--out", corrupt_flags.out, "Output CSV")->required();
    corrupt->add_option("--noise", corrupt_flags.noise, "gaussian or saltpepper")
        ->required()
        ->check(CLI::IsMember({"gaussian", "saltpepper"}));
    corrupt->add_option("--level", corrupt_flags.level, "Variance (gaussian) or density (saltpepper)")->required();
    corrupt->add_option("--seed", corrupt_flags.seed, "Random seed");
    corrupt->add_flag("--has-header", corrupt_flags.has_header, "Input CSV starts with a header row");
    auto* lo_opt = corrupt->add_option("--lo", lo, "Salt and pepper low value (default: input minimum)");
    auto* hi_opt = corrupt->add_option("--hi", hi, "Salt and pepper high value (default: input maximum)");

    SynthFlags synth_flags;
    auto* synth = app.add_subcommand("synth", "Write a synthetic multi-view blob dataset");
    synth->add_option("--clusters,-c", synth_flags.clusters, "Number of clusters")->required();
    synth->add_option("--per-cluster", synth_flags.per_cluster, "Samples per cluster")->required();
    synth->add_option("--views", synth_flags.views, "Comma-separated dim[:sigma[:noise]] entries")->required();
    synth->add_option("--separation", synth_flags.separation, "Center spacing in units of sigma");
    synth->add_option("--seed", synth_flags.seed, "Random seed");
    synth->add_option("--layout", synth_flags.layout, "Center layout: rays or box")->check(CLI::IsMember({"rays", "box"}));
    synth->add_option("--name", synth_flags.name, "Dataset name");
    synth->add_option("--out-dir,-o", synth_flags.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (*cluster) return cmd_cluster(cluster_flags, out);
        if (*grid) return cmd_grid(grid_flags, alpha_list, beta_list, out);
        if (*eval) return cmd_eval(pred_path, truth_path, out);
        if (*corrupt) {
            if (*lo_opt) corrupt_flags.lo = lo;
            if (*hi_opt) corrupt_flags.hi = hi;
            return cmd_corrupt(corrupt_flags, out);
        }
        if (*synth) return cmd_synth(synth_flags, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace pfsc::cli
