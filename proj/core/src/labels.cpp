#include "pfsc/labels.hpp"

#include <limits>
#include <string>

#include "pfsc/error.hpp"

namespace pfsc::labels {

namespace {

// Assigns every point to its nearest centroid (lowest index on ties).
// Returns the total squared distance.
double assign(const Matrix& points, const Matrix& centroids, std::vector<int>& assignments,
              std::vector<double>& dist) {
    const auto n = points.rows();
    const auto c = centroids.rows();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_k = 0;
        for (Eigen::Index k = 0; k < c; ++k) {
            const double d = (points.row(i) - centroids.row(k)).squaredNorm();
            if (d < best) {
                best = d;
                best_k = static_cast<int>(k);
            }
        }
        assignments[static_cast<std::size_t>(i)] = best_k;
        dist[static_cast<std::size_t>(i)] = best;
        total += best;
    }
    return total;
}

Matrix seed_kmeanspp(const Matrix& points, std::size_t c, numerics::Rng& rng) {
    const auto n = points.rows();
    Matrix centroids(static_cast<Eigen::Index>(c), points.cols());
    centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
    Vector closest = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
    for (std::size_t k = 1; k < c; ++k) {
        const double total = closest.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= closest(i);
                if (target < 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
        }
        centroids.row(static_cast<Eigen::Index>(k)) = points.row(pick);
        closest = closest.cwiseMin((points.rowwise() - points.row(pick)).rowwise().squaredNorm());
    }
    return centroids;
}

} // namespace

KMeansRun kmeans_once(const Matrix& points, std::size_t c, std::size_t max_iters, numerics::Rng& rng) {
    const auto n = static_cast<std::size_t>(points.rows());
    if (c < 1) throw InvalidInput("k-means needs at least one cluster");
    if (n < c) throw InvalidInput("k-means: " + std::to_string(n) + " points cannot form " + std::to_string(c) + " clusters");

    KMeansRun run;
    run.centroids = seed_kmeanspp(points, c, rng);
    run.assignments.assign(n, 0);
    std::vector<double> dist(n, 0.0);
    std::vector<int> previous;

    for (std::size_t it = 0; it < std::max<std::size_t>(max_iters, 1); ++it) {
        run.inertia = assign(points, run.centroids, run.assignments, dist);
        run.inertia_history.push_back(run.inertia);
        if (run.assignments == previous) break;
        previous = run.assignments;

        Matrix sums = Matrix::Zero(static_cast<Eigen::Index>(c), points.cols());
        std::vector<std::size_t> counts(c, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(run.assignments[i]);
            sums.row(static_cast<Eigen::Index>(k)) += points.row(static_cast<Eigen::Index>(i));
            ++counts[k];
        }
        for (std::size_t k = 0; k < c; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            if (counts[k] > 0) {
                run.centroids.row(kk) = sums.row(kk) / static_cast<double>(counts[k]);
                continue;
            }
            // Empty cluster: move it onto the point worst served by its centroid.
            std::size_t far = 0;
            for (std::size_t i = 1; i < n; ++i) {
                if (dist[i] > dist[far]) far = i;
            }
            run.centroids.row(kk) = points.row(static_cast<Eigen::Index>(far));
            dist[far] = 0.0;
        }
    }
    return run;
}

KMeansResult kmeans(const Matrix& points, const KMeansConfig& cfg) {
    if (cfg.restarts < 1) throw InvalidInput("k-means needs at least one restart");
    if (!points.allFinite()) throw InvalidInput("k-means input has non-finite entries");
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < cfg.restarts; ++r) {
        numerics::Rng rng(cfg.seed + r);
        auto run = kmeans_once(points, cfg.c, cfg.max_iters, rng);
        if (run.inertia < best.inertia) {
            best.inertia = run.inertia;
            best.labeling.assignments = std::move(run.assignments);
        }
    }
    best.labeling.c = cfg.c;
    return best;
}

Labeling embedding_to_labels(const Matrix& E, const KMeansConfig& cfg, bool row_normalize) {
    if (!row_normalize) return kmeans(E, cfg).labeling;
    Matrix rows = E;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const double norm = rows.row(i).norm();
        if (norm < 1e-12) {
            rows.row(i).setZero();
        } else {
            rows.row(i) /= norm;
        }
    }
    return kmeans(rows, cfg).labeling;
}

} // namespace pfsc::labels
