#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pfsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One view of the data, stored features x samples (m_v x n).
struct ViewMatrix {
    std::string name;
    Matrix data;

    std::size_t features() const { return static_cast<std::size_t>(data.rows()); }
    std::size_t samples() const { return static_cast<std::size_t>(data.cols()); }
};

/// t views over the same n samples, with optional ground truth.
///
/// Construction through make() validates: at least one view, every view
/// with n samples and at least one feature, all entries finite, and labels
/// (if present) of length n with non-negative ids.
class MultiViewDataset {
public:
    MultiViewDataset() = default;

    static MultiViewDataset make(std::vector<ViewMatrix> views,
                                 std::optional<std::vector<int>> labels = std::nullopt);

    const std::vector<ViewMatrix>& views() const { return views_; }
    const ViewMatrix& view(std::size_t v) const { return views_.at(v); }
    std::size_t num_views() const { return views_.size(); }
    std::size_t n() const { return n_; }
    const std::optional<std::vector<int>>& labels() const { return labels_; }

    bool operator==(const MultiViewDataset& other) const;

private:
    std::vector<ViewMatrix> views_;
    std::size_t n_ = 0;
    std::optional<std::vector<int>> labels_;
};

/// Which assembly of the partition-update matrix to use.
///   paper:   alpha*L_v + w_v*I - 2YY' - 2*sum_{j!=v} F_jF_j'
///   derived: alpha*L_v - 2YY' + 2*sum_{j!=v} w_j F_jF_j'   (exact block minimizer)
enum class MVariant { paper, derived };

/// Where the weight QP is solved inside one outer iteration.
enum class WeightSchedule {
    per_view,   // after each view's S/F refresh
    per_pass,   // once, after all views were refreshed
};

/// Whether F_v updates inside one pass see partitions already refreshed in the
/// same pass (gauss_seidel) or only last pass's values (jacobi).
enum class PartitionSweep { gauss_seidel, jacobi };

struct HyperParams {
    double alpha = 1.0;
    double beta = 1.0;
    std::size_t c = 2;
    std::size_t max_outer_iters = 50;
    double rel_obj_tol = 1e-6;
    std::uint64_t seed = 0;
    MVariant m_variant = MVariant::paper;
    bool row_normalize_embedding = true;
    WeightSchedule weight_schedule = WeightSchedule::per_view;
    PartitionSweep sweep = PartitionSweep::gauss_seidel;
    std::size_t kmeans_restarts = 10;
    std::size_t kmeans_max_iters = 300;

    /// Throws InvalidInput when a field is out of range, or when c > n for n > 0.
    void validate(std::size_t n = 0) const;
};

struct ModelState {
    std::vector<Matrix> S;  // per view, n x n, nonnegative
    std::vector<Matrix> F;  // per view, n x c, orthonormal columns
    Vector w;               // length t, on the probability simplex
    Matrix Y;               // n x c, orthonormal columns

    std::size_t num_views() const { return F.size(); }
};

struct InvariantReport {
    double max_f_orthogonality_error = 0.0;
    double y_orthogonality_error = 0.0;
    double weight_sum_error = 0.0;
    double min_weight = 0.0;
    double min_s_entry = 0.0;

    bool ok() const;
};

/// Measures the three ModelState invariants without throwing.
InvariantReport check_invariants(const ModelState& state);

/// ||A'A - I||_inf, elementwise max.
double orthonormality_error(const Matrix& A);

struct MonotonicityViolation {
    std::size_t iter;
    double delta;  // obj_k - obj_{k-1}, positive
};

struct FitTrace {
    double initial_objective = 0.0;
    std::vector<double> objective_per_iter;
    std::vector<Vector> weights_per_iter;
    std::size_t iters_run = 0;
    bool converged = false;
    std::vector<MonotonicityViolation> monotonicity_violations;
};

struct Labeling {
    std::vector<int> assignments;
    std::size_t c = 0;

    std::size_t n() const { return assignments.size(); }

    /// c is inferred as max id + 1. Throws InvalidInput on empty input or a negative id.
    static Labeling from_ids(std::vector<int> ids);
};

} // namespace pfsc
