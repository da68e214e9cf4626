#pragma once

#include <span>
#include <vector>

#include "pfsc/numerics.hpp"
#include "pfsc/types.hpp"

namespace pfsc::blocks {

/// Per-view quantities that stay fixed across outer iterations: the Gram
/// matrix X'X (whose i-th column is X'X_{:,i}) and the Cholesky factor of
/// X'X + beta*I.
class ViewCache {
public:
    ViewCache(const Matrix& X, double beta);

    /// Refactors when beta differs from the cached value.
    void rebuild(double beta);

    const Matrix& gram() const { return gram_; }
    const numerics::SpdFactorization& factor() const { return factor_; }
    double beta() const { return beta_; }
    Eigen::Index n() const { return gram_.rows(); }

private:
    Matrix gram_;
    numerics::SpdFactorization factor_;
    double beta_;
};

/// L = D - W with W = (S + S')/2 and D the diagonal of W's row sums.
/// Throws NegativeEntry on any negative entry of S.
Matrix build_laplacian(const Matrix& S);

/// Squared Euclidean distances between rows of F: D_ij = ||F_i: - F_j:||^2.
Matrix row_distances(const Matrix& F);

/// Graph update before clamping: column i solves
/// (X'X + beta I) s = X'X_{:,i} - (alpha/4) d_i.
Matrix solve_s_unclamped(const ViewCache& cache, const Matrix& F, double alpha);

/// solve_s_unclamped followed by max(S, 0).
Matrix update_s(const ViewCache& cache, const Matrix& F, double alpha);

/// Assembles the symmetric matrix whose bottom-c eigenvectors give F_v.
/// `F` holds the partitions of all views; entry v is ignored.
Matrix assemble_partition_matrix(const Matrix& L, const Vector& w, std::size_t v, const Matrix& Y,
                                 std::span<const Matrix> F, double alpha, MVariant variant);

/// Partition update for view v. Under MVariant::derived with w_v == 0 the
/// subproblem vanishes and F[v] is returned unchanged.
Matrix update_f(const Matrix& L, const Vector& w, std::size_t v, const Matrix& Y,
                std::span<const Matrix> F, double alpha, MVariant variant);

/// g = ||X - XS||_F^2 + alpha Tr(F'LF) + beta ||S||_F^2, with X stored m x n.
double per_view_loss(const Matrix& X, const Matrix& S, const Matrix& F, const Matrix& L,
                     double alpha, double beta);

/// min w'Pw - q'w over the probability simplex.
struct WeightQp {
    Matrix P;  // P_ij = Tr(F_iF_i' F_jF_j') = ||F_i'F_j||_F^2
    Vector q;  // q_i = -g_i + 2 Tr(YY' F_iF_i')
    Vector g;

    double value(const Vector& w) const { return w.dot(P * w) - q.dot(w); }
};

WeightQp build_weight_qp(std::span<const Matrix> F, const Matrix& Y, const Vector& g);

struct WeightQpOptions {
    double step_tol = 1e-10;
    std::size_t max_iters = 100000;
    double step_eps = 1e-12;
};

/// Accelerated projected gradient (restarted whenever momentum increases the
/// objective) with step 1/(2||P||_2 + eps), projecting onto the simplex each
/// step. Stops once a step moves no coordinate by step_tol or more; throws
/// ConvergenceFailure if max_iters is hit first.
Vector update_w(const WeightQp& qp, const Vector& w0, const WeightQpOptions& opts = {});
Vector update_w(const WeightQp& qp);

/// Top-c eigenvectors of sum_v w_v F_vF_v'.
Matrix update_y(std::span<const Matrix> F, const Vector& w);

/// ||YY' - sum_v w_v F_vF_v'||_F^2, evaluated through c x c cross products.
double fusion_term(std::span<const Matrix> F, const Vector& w, const Matrix& Y);

struct ObjectiveParts {
    Vector g;            // per-view losses
    double fusion = 0.0;
    double total = 0.0;  // w'g + fusion
};

ObjectiveParts objective_parts(const ModelState& state, const MultiViewDataset& data, double alpha, double beta);

/// Full PFSC objective value for `state`.
double objective(const ModelState& state, const MultiViewDataset& data, const HyperParams& params);

} // namespace pfsc::blocks
