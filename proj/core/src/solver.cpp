#include "pfsc/solver.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "pfsc/error.hpp"
#include "pfsc/format.hpp"

namespace pfsc::solver {

ModelState init_state(const MultiViewDataset& data, const HyperParams& params, numerics::Rng& rng) {
    const auto n = static_cast<Eigen::Index>(data.n());
    const auto c = static_cast<Eigen::Index>(params.c);
    const auto t = data.num_views();
    if (t == 0 || n == 0) throw InvalidInput("dataset is empty");
    if (c > n) throw DimensionMismatch("cluster count exceeds sample count");

    ModelState s;
    s.S.assign(t, Matrix::Zero(n, n));
    s.F.reserve(t);
    for (std::size_t v = 0; v < t; ++v) s.F.push_back(numerics::random_orthonormal(n, c, rng));
    s.w = Vector::Constant(static_cast<Eigen::Index>(t), 1.0 / static_cast<double>(t));
    s.Y = numerics::random_orthonormal(n, c, rng);
    return s;
}

FitResult fit(const MultiViewDataset& data, const HyperParams& params, const IterationObserver& observer) {
    if (data.num_views() == 0 || data.n() == 0) throw InvalidInput("dataset is empty");
    params.validate(data.n());

    const auto t = data.num_views();
    const auto n = static_cast<Eigen::Index>(data.n());

    std::vector<blocks::ViewCache> caches;
    caches.reserve(t);
    for (const auto& view : data.views()) caches.emplace_back(view.data, params.beta);

    numerics::Rng rng(params.seed);
    FitResult result;
    ModelState& st = result.state;
    st = init_state(data, params, rng);

    std::vector<Matrix> laplacians(t, Matrix::Zero(n, n));
    Vector g(static_cast<Eigen::Index>(t));
    for (std::size_t v = 0; v < t; ++v) {
        g(static_cast<Eigen::Index>(v)) =
            blocks::per_view_loss(data.view(v).data, st.S[v], st.F[v], laplacians[v], params.alpha, params.beta);
    }

    FitTrace& trace = result.trace;
    trace.initial_objective = blocks::objective(st, data, params);
    double previous = trace.initial_objective;

    for (std::size_t iter = 1; iter <= params.max_outer_iters; ++iter) {
        std::vector<Matrix> snapshot;
        if (params.sweep == PartitionSweep::jacobi) snapshot = st.F;

        for (std::size_t v = 0; v < t; ++v) {
            const auto vi = static_cast<Eigen::Index>(v);
            st.S[v] = blocks::update_s(caches[v], st.F[v], params.alpha);
            laplacians[v] = blocks::build_laplacian(st.S[v]);
            const auto& partitions = params.sweep == PartitionSweep::jacobi ? snapshot : st.F;
            st.F[v] = blocks::update_f(laplacians[v], st.w, v, st.Y, partitions, params.alpha, params.m_variant);
            g(vi) = blocks::per_view_loss(data.view(v).data, st.S[v], st.F[v], laplacians[v], params.alpha,
                                          params.beta);
            if (params.weight_schedule == WeightSchedule::per_view) {
                st.w = blocks::update_w(blocks::build_weight_qp(st.F, st.Y, g), st.w);
            }
        }
        if (params.weight_schedule == WeightSchedule::per_pass) {
            st.w = blocks::update_w(blocks::build_weight_qp(st.F, st.Y, g), st.w);
        }
        st.Y = blocks::update_y(st.F, st.w);

        const double value = st.w.dot(g) + blocks::fusion_term(st.F, st.w, st.Y);
        trace.objective_per_iter.push_back(value);
        trace.weights_per_iter.push_back(st.w);
        trace.iters_run = iter;
        const double delta = value - previous;
        if (delta > 1e-12 * std::max(std::abs(previous), 1.0)) {
            trace.monotonicity_violations.push_back({iter, delta});
        }

        const auto report = check_invariants(st);
        if (!report.ok()) {
            throw ConvergenceFailure("model invariants broken after iteration " + std::to_string(iter));
        }
        if (observer) observer(iter, st);

        if (std::abs(delta) <= params.rel_obj_tol * std::max(std::abs(previous), 1.0)) {
            trace.converged = true;
            break;
        }
        previous = value;
    }

    result.labels = labels::embedding_to_labels(st.Y, kmeans_config(params), params.row_normalize_embedding);
    return result;
}

FitResult fit_with_trace_export(const MultiViewDataset& data, const HyperParams& params,
                                const std::filesystem::path& path) {
    if (path.empty()) throw IoError("trace path is empty");
    {
        std::ofstream probe(path);
        if (!probe) throw IoError("cannot open trace file " + path.string());
    }
    auto result = fit(data, params);
    write_trace(result.trace, path);
    return result;
}

labels::KMeansConfig kmeans_config(const HyperParams& params) {
    labels::KMeansConfig cfg;
    cfg.c = params.c;
    cfg.restarts = params.kmeans_restarts;
    cfg.max_iters = params.kmeans_max_iters;
    cfg.seed = params.seed;
    return cfg;
}

Labeling partition_labels(const FitResult& result, std::size_t v, const HyperParams& params) {
    if (v >= result.state.F.size()) throw InvalidInput("view index out of range");
    return labels::embedding_to_labels(result.state.F[v], kmeans_config(params), params.row_normalize_embedding);
}

void write_trace(const FitTrace& trace, const std::filesystem::path& path) {
    if (path.empty()) throw IoError("trace path is empty");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open trace file " + path.string());
    const auto t = trace.weights_per_iter.empty() ? 0 : trace.weights_per_iter.front().size();
    out << "iter,objective";
    for (Eigen::Index v = 0; v < t; ++v) out << ",w_" << (v + 1);
    out << '\n';
    for (std::size_t k = 0; k < trace.objective_per_iter.size(); ++k) {
        out << (k + 1) << ',' << fmt::format_double(trace.objective_per_iter[k]);
        const auto& w = trace.weights_per_iter.at(k);
        for (Eigen::Index v = 0; v < w.size(); ++v) out << ',' << fmt::format_double(w(v));
        out << '\n';
    }
    if (!out) throw IoError("failed writing trace file " + path.string());
}

FitTrace read_trace(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open trace file " + path.string());
    const auto file = path.string();
    std::string line;
    if (!std::getline(in, line) || fmt::trim(line).substr(0, 14) != "iter,objective") {
        throw ParseError(file, 1, "missing trace header");
    }
    const auto width = fmt::split(fmt::trim(line), ',').size();
    FitTrace trace;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (fmt::trim(line).empty()) continue;
        const auto fields = fmt::split(fmt::trim(line), ',');
        if (fields.size() != width) throw ParseError(file, lineno, "wrong field count");
        long long iter = 0;
        if (!fmt::parse_int(fields[0], iter) || iter != static_cast<long long>(trace.iters_run + 1)) {
            throw ParseError(file, lineno, "bad iteration number");
        }
        double obj = 0.0;
        if (!fmt::parse_double(fields[1], obj)) throw ParseError(file, lineno, "bad objective value");
        Vector w(static_cast<Eigen::Index>(width - 2));
        for (std::size_t j = 2; j < width; ++j) {
            if (!fmt::parse_double(fields[j], w(static_cast<Eigen::Index>(j - 2)))) {
                throw ParseError(file, lineno, "bad weight value");
            }
        }
        trace.objective_per_iter.push_back(obj);
        trace.weights_per_iter.push_back(std::move(w));
        trace.iters_run += 1;
    }
    return trace;
}

} // namespace pfsc::solver
