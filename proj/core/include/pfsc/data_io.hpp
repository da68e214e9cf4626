#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pfsc/numerics.hpp"
#include "pfsc/types.hpp"

namespace pfsc::io {

struct ManifestView {
    std::string name;
    std::filesystem::path path;
    std::size_t m = 0;
    bool has_header = false;
};

/// Dataset description. On disk it is a key/value text file:
///
///     name = blobs
///     n = 150
///     labels_path = labels.csv
///
///     [view]
///     name = view_1
///     path = view_1.csv
///     m = 5
///     has_header = false
///
/// '#' starts a comment line. Relative paths resolve against the manifest's
/// directory.
struct Manifest {
    std::string name;
    std::size_t n = 0;
    std::vector<ManifestView> views;
    std::optional<std::filesystem::path> labels_path;
};

Manifest parse_manifest(const std::filesystem::path& path);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Samples-per-row CSV into an n x m matrix. Throws ParseError with file and
/// line on malformed content.
Matrix read_csv_matrix(const std::filesystem::path& path, bool has_header);

/// Writes rows as CSV with 17-significant-digit decimals.
void write_csv_matrix(const Matrix& rows, const std::filesystem::path& path,
                      const std::vector<std::string>& header = {});

/// Loads every view (transposed to features x samples) and the labels, if any.
MultiViewDataset load_dataset(const std::filesystem::path& manifest_path);

/// Writes `<dir>/manifest.txt`, one CSV per view and labels.csv when labels
/// exist. Returns the manifest path.
std::filesystem::path save_dataset(const MultiViewDataset& data, const std::string& name,
                                   const std::filesystem::path& dir);

/// Maps every feature to [-1, 1] with 2(x - min)/(max - min) - 1; constant
/// features become 0.
MultiViewDataset normalize_dataset(const MultiViewDataset& data);

enum class NoiseKind { gaussian, salt_pepper };

struct NoiseSpec {
    NoiseKind kind = NoiseKind::gaussian;
    double level = 0.01;  // variance (gaussian) or density (salt & pepper)
    std::uint64_t seed = 0;
    std::optional<double> lo;  // salt & pepper endpoints; default to view min/max
    std::optional<double> hi;
};

/// Adds i.i.d. N(0, variance) to every entry; no clipping.
ViewMatrix add_gaussian_noise(const ViewMatrix& view, double variance, numerics::Rng& rng);

/// Each entry independently, with probability `density`, becomes lo or hi
/// (even odds). Untouched entries are copied bit for bit.
ViewMatrix add_salt_pepper_noise(const ViewMatrix& view, double density, double lo, double hi,
                                 numerics::Rng& rng);

/// As above with lo/hi taken from the view's own min and max.
ViewMatrix add_salt_pepper_noise(const ViewMatrix& view, double density, numerics::Rng& rng);

ViewMatrix apply_noise(const ViewMatrix& view, const NoiseSpec& spec);

/// One corrupted copy of `base` per level, each drawn from its own seed.
MultiViewDataset make_noisy_multiview(const ViewMatrix& base, const std::vector<NoiseSpec>& levels,
                                      std::optional<std::vector<int>> labels = std::nullopt);

/// How informative views place their cluster centers.
///   rays: c orthonormal directions, each center on its own ray from the origin
///         (a union of one-dimensional subspaces). Needs dim >= c; smaller
///         views fall back to box.
///   box:  uniform rejection sampling in a cube, then centered at the origin.
enum class CenterLayout { rays, box };

struct BlobViewSpec {
    std::size_t dim = 2;
    double noise_sigma = 1.0;
    bool informative = true;  // false: pure N(0, sigma^2) noise, no cluster signal
    CenterLayout layout = CenterLayout::rays;
};

/// c Gaussian blobs seen through several views with shared membership. In
/// every informative view the centers are pairwise at least
/// separation * noise_sigma apart. Samples are ordered cluster by cluster.
MultiViewDataset synth_blobs(std::size_t n_per_cluster, std::size_t c, const std::vector<BlobViewSpec>& views,
                             double separation, numerics::Rng& rng);

void save_labels(const Labeling& labeling, const std::filesystem::path& path);
Labeling load_labels(const std::filesystem::path& path);

void save_weights(const Vector& w, const std::filesystem::path& path);
Vector load_weights(const std::filesystem::path& path);

} // namespace pfsc::io
