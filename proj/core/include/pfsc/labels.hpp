#pragma once

#include <cstdint>
#include <vector>

#include "pfsc/numerics.hpp"
#include "pfsc/types.hpp"

namespace pfsc::labels {

enum class KMeansInit { kmeanspp };

struct KMeansConfig {
    std::size_t c = 2;
    std::size_t restarts = 10;
    std::size_t max_iters = 300;
    std::uint64_t seed = 0;
    KMeansInit init = KMeansInit::kmeanspp;
};

struct KMeansResult {
    Labeling labeling;
    double inertia = 0.0;
};

/// One Lloyd run from a k-means++ seeding drawn from `rng`.
struct KMeansRun {
    std::vector<int> assignments;
    Matrix centroids;
    double inertia = 0.0;
    std::vector<double> inertia_history;  // after every assignment step
};

KMeansRun kmeans_once(const Matrix& points, std::size_t c, std::size_t max_iters, numerics::Rng& rng);

/// Best of cfg.restarts runs by inertia; restart r uses seed cfg.seed + r and
/// ties go to the lowest restart index. Rows of `points` are samples.
KMeansResult kmeans(const Matrix& points, const KMeansConfig& cfg);

/// k-means on the rows of a spectral embedding, optionally scaling each row to
/// unit length first (rows with norm below 1e-12 stay zero).
Labeling embedding_to_labels(const Matrix& E, const KMeansConfig& cfg, bool row_normalize);

} // namespace pfsc::labels
