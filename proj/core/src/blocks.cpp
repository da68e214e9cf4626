#include "pfsc/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pfsc/error.hpp"

namespace pfsc::blocks {

namespace {

void require_views(std::span<const Matrix> F, Eigen::Index n, Eigen::Index c, const char* who) {
    for (const auto& Fj : F) {
        if (Fj.rows() != n || Fj.cols() != c) {
            throw DimensionMismatch(std::string(who) + ": partitions must all be " + std::to_string(n) + "x" +
                                    std::to_string(c));
        }
    }
}

} // namespace

ViewCache::ViewCache(const Matrix& X, double beta) : gram_(X.transpose() * X), beta_(beta) {
    if (!(beta > 0.0)) throw InvalidInput("beta must be > 0");
    factor_ = numerics::factor_spd(gram_ + beta * Matrix::Identity(gram_.rows(), gram_.cols()));
}

void ViewCache::rebuild(double beta) {
    if (beta == beta_) return;
    if (!(beta > 0.0)) throw InvalidInput("beta must be > 0");
    factor_ = numerics::factor_spd(gram_ + beta * Matrix::Identity(gram_.rows(), gram_.cols()));
    beta_ = beta;
}

Matrix build_laplacian(const Matrix& S) {
    if (S.rows() != S.cols()) throw DimensionMismatch("graph matrix must be square");
    if (S.size() > 0 && S.minCoeff() < 0.0) throw NegativeEntry("graph matrix has a negative entry");
    const Matrix W = 0.5 * (S + S.transpose());
    Matrix L = -W;
    L.diagonal() += W.rowwise().sum();
    return L;
}

Matrix row_distances(const Matrix& F) {
    const Vector sq = F.rowwise().squaredNorm();
    Matrix D = (-2.0 * F * F.transpose()).eval();
    D.colwise() += sq;
    D.rowwise() += sq.transpose();
    D = D.cwiseMax(0.0);
    D.diagonal().setZero();
    return D;
}

Matrix solve_s_unclamped(const ViewCache& cache, const Matrix& F, double alpha) {
    if (F.rows() != cache.n()) throw DimensionMismatch("partition row count differs from sample count");
    if (!(alpha >= 0.0)) throw InvalidInput("alpha must be >= 0");
    if (alpha == 0.0) return cache.factor().solve(cache.gram());
    const Matrix rhs = cache.gram() - (alpha / 4.0) * row_distances(F);
    return cache.factor().solve(rhs);
}

Matrix update_s(const ViewCache& cache, const Matrix& F, double alpha) {
    return solve_s_unclamped(cache, F, alpha).cwiseMax(0.0);
}

Matrix assemble_partition_matrix(const Matrix& L, const Vector& w, std::size_t v, const Matrix& Y,
                                 std::span<const Matrix> F, double alpha, MVariant variant) {
    const auto n = L.rows();
    if (L.cols() != n || Y.rows() != n) throw DimensionMismatch("partition update: inconsistent sample counts");
    if (v >= F.size() || static_cast<Eigen::Index>(F.size()) != w.size()) {
        throw DimensionMismatch("partition update: view index or weight length out of range");
    }
    require_views(F, n, Y.cols(), "partition update");
    if (!(alpha >= 0.0)) throw InvalidInput("alpha must be >= 0");

    Matrix M = alpha * L;
    M.noalias() -= 2.0 * Y * Y.transpose();
    for (std::size_t j = 0; j < F.size(); ++j) {
        if (j == v) continue;
        const double coef = variant == MVariant::paper ? -2.0 : 2.0 * w(static_cast<Eigen::Index>(j));
        if (coef != 0.0) M.noalias() += coef * F[j] * F[j].transpose();
    }
    if (variant == MVariant::paper) M.diagonal().array() += w(static_cast<Eigen::Index>(v));
    return M;
}

Matrix update_f(const Matrix& L, const Vector& w, std::size_t v, const Matrix& Y,
                std::span<const Matrix> F, double alpha, MVariant variant) {
    const Matrix M = assemble_partition_matrix(L, w, v, Y, F, alpha, variant);
    if (variant == MVariant::derived && w(static_cast<Eigen::Index>(v)) == 0.0) return F[v];
    return numerics::sym_eigs_smallest(M, static_cast<std::size_t>(Y.cols())).vectors;
}

double per_view_loss(const Matrix& X, const Matrix& S, const Matrix& F, const Matrix& L,
                     double alpha, double beta) {
    const auto n = X.cols();
    if (S.rows() != n || S.cols() != n || L.rows() != n || L.cols() != n || F.rows() != n) {
        throw DimensionMismatch("per-view loss: inconsistent sample counts");
    }
    const double recon = (X - X * S).squaredNorm();
    const double smooth = alpha == 0.0 ? 0.0 : alpha * (F.transpose() * L * F).trace();
    return std::max(0.0, recon + smooth + beta * S.squaredNorm());
}

WeightQp build_weight_qp(std::span<const Matrix> F, const Matrix& Y, const Vector& g) {
    const auto t = static_cast<Eigen::Index>(F.size());
    if (t < 1 || g.size() != t) throw DimensionMismatch("weight QP: need one loss per view");
    require_views(F, Y.rows(), Y.cols(), "weight QP");
    WeightQp qp{Matrix(t, t), Vector(t), g};
    for (Eigen::Index i = 0; i < t; ++i) {
        for (Eigen::Index j = i; j < t; ++j) {
            const double p = (F[i].transpose() * F[j]).squaredNorm();
            qp.P(i, j) = p;
            qp.P(j, i) = p;
        }
        qp.q(i) = -g(i) + 2.0 * (Y.transpose() * F[i]).squaredNorm();
    }
    return qp;
}

Vector update_w(const WeightQp& qp, const Vector& w0, const WeightQpOptions& opts) {
    const auto t = qp.q.size();
    if (qp.P.rows() != t || qp.P.cols() != t || w0.size() != t) throw DimensionMismatch("weight QP: size mismatch");
    if (!qp.P.allFinite() || !qp.q.allFinite()) throw InvalidInput("weight QP has non-finite data");
    if (t == 1) return Vector::Ones(1);

    const double step = 1.0 / (2.0 * numerics::sym_spectral_norm(qp.P) + opts.step_eps);
    // Accelerated projected gradient with adaptive restart. Near-collinear
    // partitions make P close to rank one, and plain steps crawl along the
    // flat directions.
    Vector w = numerics::project_simplex(w0);
    Vector y = w;
    double momentum = 1.0;
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        const Vector grad = 2.0 * qp.P * y - qp.q;
        Vector next = numerics::project_simplex(y - step * grad);
        const double change = (next - y).cwiseAbs().maxCoeff();
        if (change < opts.step_tol) return next;
        if (momentum > 1.0 && grad.dot(next - w) > 0.0) {
            // Momentum points uphill: restart from the last iterate.
            momentum = 1.0;
            y = w;
            continue;
        }
        const double following = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        y = next + ((momentum - 1.0) / following) * (next - w);
        momentum = following;
        w = std::move(next);
    }
    throw ConvergenceFailure("weight QP: projected gradient hit the iteration limit");
}

Vector update_w(const WeightQp& qp) {
    const auto t = qp.q.size();
    return update_w(qp, Vector::Constant(t, 1.0 / static_cast<double>(std::max<Eigen::Index>(t, 1))));
}

Matrix update_y(std::span<const Matrix> F, const Vector& w) {
    if (F.empty() || static_cast<Eigen::Index>(F.size()) != w.size()) {
        throw DimensionMismatch("consensus update: need one weight per partition");
    }
    const auto n = F.front().rows();
    const auto c = F.front().cols();
    require_views(F, n, c, "consensus update");
    Matrix A = Matrix::Zero(n, n);
    for (std::size_t v = 0; v < F.size(); ++v) {
        const double wv = w(static_cast<Eigen::Index>(v));
        if (wv != 0.0) A.noalias() += wv * F[v] * F[v].transpose();
    }
    return numerics::sym_eigs_largest(A, static_cast<std::size_t>(c)).vectors;
}

double fusion_term(std::span<const Matrix> F, const Vector& w, const Matrix& Y) {
    if (static_cast<Eigen::Index>(F.size()) != w.size()) throw DimensionMismatch("fusion term: weight length");
    require_views(F, Y.rows(), Y.cols(), "fusion term");
    double value = (Y.transpose() * Y).squaredNorm();
    const auto t = static_cast<Eigen::Index>(F.size());
    for (Eigen::Index i = 0; i < t; ++i) {
        value -= 2.0 * w(i) * (Y.transpose() * F[i]).squaredNorm();
        for (Eigen::Index j = 0; j < t; ++j) {
            value += w(i) * w(j) * (F[i].transpose() * F[j]).squaredNorm();
        }
    }
    return std::max(0.0, value);
}

ObjectiveParts objective_parts(const ModelState& state, const MultiViewDataset& data, double alpha, double beta) {
    const auto t = data.num_views();
    if (state.S.size() != t || state.F.size() != t || static_cast<std::size_t>(state.w.size()) != t) {
        throw DimensionMismatch("objective: state and dataset disagree on the view count");
    }
    ObjectiveParts parts;
    parts.g.resize(static_cast<Eigen::Index>(t));
    for (std::size_t v = 0; v < t; ++v) {
        const Matrix L = build_laplacian(state.S[v]);
        parts.g(static_cast<Eigen::Index>(v)) =
            per_view_loss(data.view(v).data, state.S[v], state.F[v], L, alpha, beta);
    }
    parts.fusion = fusion_term(state.F, state.w, state.Y);
    parts.total = state.w.dot(parts.g) + parts.fusion;
    return parts;
}

double objective(const ModelState& state, const MultiViewDataset& data, const HyperParams& params) {
    return objective_parts(state, data, params.alpha, params.beta).total;
}

} // namespace pfsc::blocks
