#include "pfsc/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>
#include <string_view>

#include "pfsc/error.hpp"
#include "pfsc/format.hpp"

namespace pfsc::io {

namespace fs = std::filesystem;

namespace {

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const fs::path& path) {
    if (path.empty()) throw IoError("output path is empty");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

fs::path resolve(const fs::path& base_dir, const fs::path& p) {
    return p.is_absolute() ? p : base_dir / p;
}

std::size_t parse_count(std::string_view value, const std::string& file, std::size_t line, const char* key) {
    long long v = 0;
    if (!fmt::parse_int(value, v) || v <= 0) {
        throw ParseError(file, line, std::string(key) + " must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

bool parse_bool(std::string_view value, const std::string& file, std::size_t line) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ParseError(file, line, "expected true or false");
}

} // namespace

Manifest parse_manifest(const fs::path& path) {
    auto in = open_in(path);
    const auto file = path.string();
    Manifest m;
    ManifestView* current = nullptr;
    bool have_n = false;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = fmt::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line == "[view]") {
            m.views.emplace_back();
            current = &m.views.back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(file, lineno, "expected 'key = value'");
        const auto key = fmt::trim(line.substr(0, eq));
        const auto value = fmt::trim(line.substr(eq + 1));
        if (value.empty()) throw ParseError(file, lineno, "empty value for '" + std::string(key) + "'");

        if (current == nullptr) {
            if (key == "name") {
                m.name = value;
            } else if (key == "n") {
                m.n = parse_count(value, file, lineno, "n");
                have_n = true;
            } else if (key == "labels_path") {
                m.labels_path = fs::path(std::string(value));
            } else {
                throw ParseError(file, lineno, "unknown dataset key '" + std::string(key) + "'");
            }
        } else {
            if (key == "name") {
                current->name = value;
            } else if (key == "path") {
                current->path = fs::path(std::string(value));
            } else if (key == "m") {
                current->m = parse_count(value, file, lineno, "m");
            } else if (key == "has_header") {
                current->has_header = parse_bool(value, file, lineno);
            } else {
                throw ParseError(file, lineno, "unknown view key '" + std::string(key) + "'");
            }
        }
    }
    if (!have_n) throw ParseError(file, lineno, "manifest is missing 'n'");
    if (m.views.empty()) throw ParseError(file, lineno, "manifest declares no [view]");
    for (std::size_t v = 0; v < m.views.size(); ++v) {
        if (m.views[v].path.empty() || m.views[v].m == 0) {
            throw ParseError(file, lineno, "view " + std::to_string(v + 1) + " needs both 'path' and 'm'");
        }
        if (m.views[v].name.empty()) m.views[v].name = "view_" + std::to_string(v + 1);
    }
    return m;
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
    auto out = open_out(path);
    if (!manifest.name.empty()) out << "name = " << manifest.name << '\n';
    out << "n = " << manifest.n << '\n';
    if (manifest.labels_path) out << "labels_path = " << manifest.labels_path->generic_string() << '\n';
    for (const auto& v : manifest.views) {
        out << "\n[view]\n";
        out << "name = " << v.name << '\n';
        out << "path = " << v.path.generic_string() << '\n';
        out << "m = " << v.m << '\n';
        out << "has_header = " << (v.has_header ? "true" : "false") << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

Matrix read_csv_matrix(const fs::path& path, bool has_header) {
    auto in = open_in(path);
    const auto file = path.string();
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (has_header && lineno == 1) continue;
        const auto line = fmt::trim(raw);
        if (line.empty()) continue;
        const auto fields = fmt::split(line, ',');
        if (rows == 0) {
            cols = fields.size();
        } else if (fields.size() != cols) {
            throw ParseError(file, lineno, "expected " + std::to_string(cols) + " fields, found " +
                                               std::to_string(fields.size()));
        }
        for (const auto f : fields) {
            double x = 0.0;
            if (!fmt::parse_double(f, x)) throw ParseError(file, lineno, "not a number: '" + std::string(f) + "'");
            if (!std::isfinite(x)) throw ParseError(file, lineno, "non-finite value");
            values.push_back(x);
        }
        ++rows;
    }
    Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * cols + j];
        }
    }
    return out;
}

void write_csv_matrix(const Matrix& rows, const fs::path& path, const std::vector<std::string>& header) {
    auto out = open_out(path);
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
        out << '\n';
    }
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (Eigen::Index j = 0; j < rows.cols(); ++j) {
            if (j) out << ',';
            out << fmt::format_double(rows(i, j));
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

MultiViewDataset load_dataset(const fs::path& manifest_path) {
    const auto manifest = parse_manifest(manifest_path);
    const auto base = manifest_path.parent_path();
    std::vector<ViewMatrix> views;
    for (const auto& mv : manifest.views) {
        const auto p = resolve(base, mv.path);
        const Matrix rows = read_csv_matrix(p, mv.has_header);
        if (static_cast<std::size_t>(rows.rows()) != manifest.n) {
            throw DimensionMismatch(p.string() + ": " + std::to_string(rows.rows()) + " rows, manifest says n = " +
                                    std::to_string(manifest.n));
        }
        if (static_cast<std::size_t>(rows.cols()) != mv.m) {
            throw DimensionMismatch(p.string() + ": " + std::to_string(rows.cols()) +
                                    " columns, manifest says m = " + std::to_string(mv.m));
        }
        views.push_back({mv.name, rows.transpose()});
    }
    std::optional<std::vector<int>> labels;
    if (manifest.labels_path) {
        const auto p = resolve(base, *manifest.labels_path);
        auto l = load_labels(p);
        if (l.n() != manifest.n) {
            throw DimensionMismatch(p.string() + ": " + std::to_string(l.n()) + " labels, manifest says n = " +
                                    std::to_string(manifest.n));
        }
        labels = std::move(l.assignments);
    }
    return MultiViewDataset::make(std::move(views), std::move(labels));
}

fs::path save_dataset(const MultiViewDataset& data, const std::string& name, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
    Manifest m;
    m.name = name;
    m.n = data.n();
    for (std::size_t v = 0; v < data.num_views(); ++v) {
        const auto& view = data.view(v);
        const auto file = "view_" + std::to_string(v + 1) + ".csv";
        write_csv_matrix(view.data.transpose(), dir / file);
        m.views.push_back({view.name.empty() ? "view_" + std::to_string(v + 1) : view.name, file, view.features(), false});
    }
    if (data.labels()) {
        save_labels(Labeling::from_ids(*data.labels()), dir / "labels.csv");
        m.labels_path = "labels.csv";
    }
    const auto manifest_path = dir / "manifest.txt";
    write_manifest(m, manifest_path);
    return manifest_path;
}

MultiViewDataset normalize_dataset(const MultiViewDataset& data) {
    std::vector<ViewMatrix> views;
    views.reserve(data.num_views());
    for (const auto& view : data.views()) {
        ViewMatrix out{view.name, view.data};
        for (Eigen::Index r = 0; r < out.data.rows(); ++r) {
            const double lo = out.data.row(r).minCoeff();
            const double hi = out.data.row(r).maxCoeff();
            if (hi > lo) {
                const double range = hi - lo;
                for (Eigen::Index j = 0; j < out.data.cols(); ++j) {
                    out.data(r, j) = std::clamp(2.0 * (out.data(r, j) - lo) / range - 1.0, -1.0, 1.0);
                }
            } else {
                out.data.row(r).setZero();
            }
        }
        views.push_back(std::move(out));
    }
    return MultiViewDataset::make(std::move(views), data.labels());
}

ViewMatrix add_gaussian_noise(const ViewMatrix& view, double variance, numerics::Rng& rng) {
    if (!(variance > 0.0) || !std::isfinite(variance)) throw InvalidInput("gaussian noise variance must be > 0");
    const double sd = std::sqrt(variance);
    ViewMatrix out = view;
    for (Eigen::Index j = 0; j < out.data.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.data.rows(); ++i) out.data(i, j) += sd * rng.normal();
    }
    return out;
}

ViewMatrix add_salt_pepper_noise(const ViewMatrix& view, double density, double lo, double hi,
                                 numerics::Rng& rng) {
    if (!(density > 0.0 && density < 1.0)) throw InvalidInput("salt & pepper density must lie in (0, 1)");
    if (!(lo < hi)) throw InvalidInput("salt & pepper needs lo < hi");
    ViewMatrix out = view;
    for (Eigen::Index j = 0; j < out.data.cols(); ++j) {
        for (Eigen::Index i = 0; i < out.data.rows(); ++i) {
            if (rng.uniform() < density) out.data(i, j) = rng.uniform() < 0.5 ? lo : hi;
        }
    }
    return out;
}

ViewMatrix add_salt_pepper_noise(const ViewMatrix& view, double density, numerics::Rng& rng) {
    if (view.data.size() == 0) throw InvalidInput("view is empty");
    const double lo = view.data.minCoeff();
    double hi = view.data.maxCoeff();
    if (!(lo < hi)) hi = lo + 1.0;  // constant view: pepper keeps the value, salt one unit above
    return add_salt_pepper_noise(view, density, lo, hi, rng);
}

ViewMatrix apply_noise(const ViewMatrix& view, const NoiseSpec& spec) {
    numerics::Rng rng(spec.seed);
    if (spec.kind == NoiseKind::gaussian) return add_gaussian_noise(view, spec.level, rng);
    if (spec.lo || spec.hi) {
        const double lo = spec.lo.value_or(view.data.minCoeff());
        const double hi = spec.hi.value_or(view.data.maxCoeff());
        return add_salt_pepper_noise(view, spec.level, lo, hi, rng);
    }
    return add_salt_pepper_noise(view, spec.level, rng);
}

MultiViewDataset make_noisy_multiview(const ViewMatrix& base, const std::vector<NoiseSpec>& levels,
                                      std::optional<std::vector<int>> labels) {
    if (levels.empty()) throw InvalidInput("need at least one noise level");
    std::vector<ViewMatrix> views;
    views.reserve(levels.size());
    for (const auto& spec : levels) {
        auto v = apply_noise(base, spec);
        v.name = (spec.kind == NoiseKind::gaussian ? "gaussian_" : "saltpepper_") + fmt::format_double(spec.level);
        views.push_back(std::move(v));
    }
    return MultiViewDataset::make(std::move(views), std::move(labels));
}

MultiViewDataset synth_blobs(std::size_t n_per_cluster, std::size_t c, const std::vector<BlobViewSpec>& views,
                             double separation, numerics::Rng& rng) {
    if (n_per_cluster == 0 || c == 0 || views.empty()) throw InvalidInput("blob sizes must be positive");
    if (!(separation >= 0.0)) throw InvalidInput("separation must be >= 0");
    const auto n = static_cast<Eigen::Index>(n_per_cluster * c);
    std::vector<int> truth(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) truth[static_cast<std::size_t>(i)] = static_cast<int>(static_cast<std::size_t>(i) / n_per_cluster);

    std::vector<ViewMatrix> out;
    for (std::size_t v = 0; v < views.size(); ++v) {
        const auto& spec = views[v];
        if (spec.dim == 0 || !(spec.noise_sigma > 0.0)) throw InvalidInput("blob views need dim > 0 and sigma > 0");
        const auto dim = static_cast<Eigen::Index>(spec.dim);
        Matrix centers = Matrix::Zero(dim, static_cast<Eigen::Index>(c));
        const bool rays = spec.layout == CenterLayout::rays && spec.dim >= c;
        if (spec.informative && c > 1 && rays) {
            // Orthonormal directions scaled so neighbouring centers sit exactly min_dist apart.
            const Matrix Q = numerics::orthonormalize(rng.gaussian_matrix(dim, static_cast<Eigen::Index>(c)));
            centers = Q * (separation * spec.noise_sigma / std::sqrt(2.0));
        } else if (spec.informative && c > 1) {
            // Rejection sampling in a box that grows until the spacing fits.
            const double min_dist = separation * spec.noise_sigma;
            double side = std::max(min_dist, 1e-12) * static_cast<double>(c);
            std::size_t placed = 0;
            std::size_t failures = 0;
            while (placed < c) {
                Vector cand(dim);
                for (Eigen::Index d = 0; d < dim; ++d) cand(d) = rng.uniform(0.0, side);
                bool ok = true;
                for (std::size_t k = 0; k < placed && ok; ++k) {
                    ok = (centers.col(static_cast<Eigen::Index>(k)) - cand).norm() >= min_dist;
                }
                if (ok) {
                    centers.col(static_cast<Eigen::Index>(placed++)) = cand;
                } else if (++failures % 1000 == 0) {
                    side *= 1.1;
                }
            }
            centers.colwise() -= centers.rowwise().mean();
        }
        Matrix X(dim, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto k = static_cast<Eigen::Index>(truth[static_cast<std::size_t>(i)]);
            for (Eigen::Index d = 0; d < dim; ++d) X(d, i) = centers(d, k) + spec.noise_sigma * rng.normal();
        }
        out.push_back({(spec.informative ? "blob_" : "noise_") + std::to_string(v + 1), std::move(X)});
    }
    return MultiViewDataset::make(std::move(out), std::move(truth));
}

void save_labels(const Labeling& labeling, const fs::path& path) {
    auto out = open_out(path);
    for (int id : labeling.assignments) out << id << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

Labeling load_labels(const fs::path& path) {
    auto in = open_in(path);
    const auto file = path.string();
    std::vector<int> ids;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const auto line = fmt::trim(raw);
        if (line.empty()) continue;
        long long id = 0;
        if (!fmt::parse_int(line, id) || id < 0 || id > 1'000'000'000) {
            throw ParseError(file, lineno, "expected a non-negative integer cluster id");
        }
        ids.push_back(static_cast<int>(id));
    }
    if (ids.empty()) throw ParseError(file, lineno, "labels file is empty");
    return Labeling::from_ids(std::move(ids));
}

void save_weights(const Vector& w, const fs::path& path) {
    auto out = open_out(path);
    for (Eigen::Index v = 0; v < w.size(); ++v) out << (v ? "," : "") << fmt::format_double(w(v));
    out << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

Vector load_weights(const fs::path& path) {
    auto in = open_in(path);
    std::string raw;
    if (!std::getline(in, raw) || fmt::trim(raw).empty()) throw ParseError(path.string(), 1, "weights file is empty");
    const auto fields = fmt::split(fmt::trim(raw), ',');
    Vector w(static_cast<Eigen::Index>(fields.size()));
    for (std::size_t v = 0; v < fields.size(); ++v) {
        if (!fmt::parse_double(fields[v], w(static_cast<Eigen::Index>(v)))) {
            throw ParseError(path.string(), 1, "bad weight value");
        }
    }
    return w;
}

} // namespace pfsc::io
