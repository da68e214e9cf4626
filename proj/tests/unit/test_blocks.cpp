#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pfsc/blocks.hpp"
#include "pfsc/error.hpp"

using namespace pfsc;
using namespace pfsc::blocks;

namespace {

double projector_gap(const Matrix& A, const Matrix& B) {
    return (A * A.transpose() - B * B.transpose()).norm();
}

Matrix m2(double a, double b, double c, double d) {
    Matrix M(2, 2);
    M << a, b, c, d;
    return M;
}

} // namespace

TEST_CASE("build_laplacian fixed examples") {
    CHECK(build_laplacian(m2(0, 1, 1, 0)) == m2(1, -1, -1, 1));
    CHECK(build_laplacian(Matrix::Zero(3, 3)) == Matrix::Zero(3, 3));
    CHECK(build_laplacian(m2(0, 2, 0, 0)) == m2(1, -1, -1, 1));
    CHECK_THROWS_AS(build_laplacian(m2(0, -1e-300, 0, 0)), NegativeEntry);
}

TEST_CASE("build_laplacian properties on random nonnegative graphs") {
    std::mt19937_64 gen(21);
    for (Eigen::Index n : {1, 4, 9, 20}) {
        const Matrix S = oracle::random_nonnegative(gen, n);
        const Matrix L = build_laplacian(S);
        CHECK((L - L.transpose()).norm() == 0.0);
        CHECK((L * Vector::Ones(n)).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, S.sum()));
        CHECK(oracle::all_eigenvalues(L).minCoeff() >= -1e-10 * std::max(1.0, L.norm()));
        CHECK((L - oracle::laplacian(S)).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("update_s fixed examples") {
    const Matrix X = Matrix::Identity(2, 2);
    SUBCASE("alpha 0 gives the ridge solution") {
        ViewCache cache(X, 1.0);
        CHECK((update_s(cache, Matrix::Identity(2, 2), 0.0) - 0.5 * Matrix::Identity(2, 2)).norm() <= 1e-15);
    }
    SUBCASE("alpha 4 with F = I, solved by hand") {
        ViewCache cache(X, 1.0);
        const Matrix F = Matrix::Identity(2, 2);
        // (2I) s_i = e_i - d_i with d = [[0,2],[2,0]].
        const Matrix pre = solve_s_unclamped(cache, F, 4.0);
        CHECK((pre - m2(0.5, -1, -1, 0.5)).norm() <= 1e-14);
        CHECK((update_s(cache, F, 4.0) - 0.5 * Matrix::Identity(2, 2)).norm() <= 1e-14);
    }
}

TEST_CASE("update_s with alpha 0 ignores F") {
    std::mt19937_64 gen(22);
    const Matrix X = oracle::random_matrix(gen, 4, 7);
    ViewCache cache(X, 0.7);
    const Matrix a = update_s(cache, oracle::random_orthonormal(gen, 7, 2), 0.0);
    const Matrix b = update_s(cache, oracle::random_orthonormal(gen, 7, 2), 0.0);
    CHECK(a == b);
}

TEST_CASE("update_s solves its linear system and clamps") {
    std::mt19937_64 gen(23);
    for (int rep = 0; rep < 5; ++rep) {
        const Eigen::Index n = 6 + rep;
        const Matrix X = oracle::random_matrix(gen, 3 + rep, n);
        const Matrix F = oracle::random_orthonormal(gen, n, 2);
        const double alpha = 0.5 + rep, beta = 0.3 + 0.2 * rep;
        ViewCache cache(X, beta);
        const Matrix pre = solve_s_unclamped(cache, F, alpha);
        const Matrix A = X.transpose() * X + beta * Matrix::Identity(n, n);
        Matrix D(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) D(i, j) = (F.row(i) - F.row(j)).squaredNorm();
        const Matrix rhs = X.transpose() * X - 0.25 * alpha * D;
        for (Eigen::Index i = 0; i < n; ++i) {
            CHECK((A * pre.col(i) - rhs.col(i)).norm() <= 1e-8 * std::max(1.0, rhs.col(i).norm()));
        }
        const Matrix S = update_s(cache, F, alpha);
        CHECK(S.minCoeff() >= 0.0);
        CHECK(S == pre.cwiseMax(0.0));
    }
}

TEST_CASE("ViewCache rebuild switches beta") {
    std::mt19937_64 gen(24);
    const Matrix X = oracle::random_matrix(gen, 3, 5);
    ViewCache a(X, 1.0);
    a.rebuild(2.0);
    ViewCache b(X, 2.0);
    const Matrix F = oracle::random_orthonormal(gen, 5, 2);
    CHECK(update_s(a, F, 1.0) == update_s(b, F, 1.0));
    CHECK(a.beta() == 2.0);
}

TEST_CASE("update_f single view with alpha 0 recovers span(Y)") {
    std::mt19937_64 gen(25);
    const Matrix Y = oracle::random_orthonormal(gen, 7, 2);
    const std::vector<Matrix> F{oracle::random_orthonormal(gen, 7, 2)};
    const Vector w = Vector::Ones(1);
    const Matrix L = Matrix::Zero(7, 7);
    for (auto variant : {MVariant::paper, MVariant::derived}) {
        const Matrix M = assemble_partition_matrix(L, w, 0, Y, F, 0.0, variant);
        if (variant == MVariant::paper) {
            CHECK((M - (Matrix::Identity(7, 7) - 2.0 * Y * Y.transpose())).norm() <= 1e-14);
        }
        const Matrix Fn = update_f(L, w, 0, Y, F, 0.0, variant);
        CHECK(projector_gap(Fn, Y) <= 1e-8);
    }
}

TEST_CASE("update_f picks basis vectors for a diagonal assembly") {
    // Single view, alpha 1, w = 1, Y orthogonal to the selected coordinates: M = L + I - 2YY'.
    Matrix L = Matrix::Zero(5, 5);
    L.diagonal() << 4, 0.5, 3, 0.25, 2;
    Matrix Y = Matrix::Zero(5, 2);
    Y(0, 0) = 1.0;
    Y(2, 1) = 1.0;
    // Diagonal of M: 4-2+1, 1.5, 3-2+1, 1.25, 3 -> smallest are indices 3 and 1.
    const std::vector<Matrix> F{Matrix::Zero(5, 2)};
    const Matrix Fn = update_f(L, Vector::Ones(1), 0, Y, F, 1.0, MVariant::paper);
    CHECK(std::abs(Fn(3, 0) - 1.0) <= 1e-12);
    CHECK(std::abs(Fn(1, 1) - 1.0) <= 1e-12);
}

TEST_CASE("update_f reaches the dense eigen oracle minimum") {
    std::mt19937_64 gen(26);
    for (auto variant : {MVariant::paper, MVariant::derived}) {
        for (int rep = 0; rep < 5; ++rep) {
            const Eigen::Index n = 8;
            const Matrix L = oracle::laplacian(oracle::random_nonnegative(gen, n));
            const std::vector<Matrix> F{oracle::random_orthonormal(gen, n, 2), oracle::random_orthonormal(gen, n, 2),
                                        oracle::random_orthonormal(gen, n, 2)};
            const Matrix Y = oracle::random_orthonormal(gen, n, 2);
            Vector w(3);
            w << 0.2, 0.5, 0.3;
            const Matrix M = assemble_partition_matrix(L, w, 1, Y, F, 1.3, variant);
            // Independent assembly of the same matrix.
            Matrix ref = 1.3 * L - 2.0 * Y * Y.transpose();
            if (variant == MVariant::paper) {
                ref += w(1) * Matrix::Identity(n, n);
                ref -= 2.0 * (F[0] * F[0].transpose() + F[2] * F[2].transpose());
            } else {
                ref += 2.0 * (w(0) * F[0] * F[0].transpose() + w(2) * F[2] * F[2].transpose());
            }
            CHECK((M - ref).norm() <= 1e-12);
            const Matrix Fn = update_f(L, w, 1, Y, F, 1.3, variant);
            CHECK(orthonormality_error(Fn) <= 1e-8);
            CHECK(std::abs((Fn.transpose() * ref * Fn).trace() - oracle::min_trace(ref, 2)) <= 1e-8);
        }
    }
}

TEST_CASE("derived variant keeps F when the view weight is zero") {
    std::mt19937_64 gen(27);
    const std::vector<Matrix> F{oracle::random_orthonormal(gen, 6, 2), oracle::random_orthonormal(gen, 6, 2)};
    Vector w(2);
    w << 0.0, 1.0;
    const Matrix Fn = update_f(Matrix::Zero(6, 6), w, 0, oracle::random_orthonormal(gen, 6, 2), F, 1.0,
                               MVariant::derived);
    CHECK(Fn == F[0]);
}

TEST_CASE("per_view_loss fixed examples and direct evaluation") {
    std::mt19937_64 gen(28);
    const Matrix X = oracle::random_matrix(gen, 3, 4);
    const Matrix F = oracle::random_orthonormal(gen, 4, 2);
    const Matrix Z = Matrix::Zero(4, 4);
    CHECK(per_view_loss(X, Z, F, build_laplacian(Z), 0.0, 1.0) == doctest::Approx(X.squaredNorm()).epsilon(1e-14));
    const Matrix I = Matrix::Identity(4, 4);
    CHECK(per_view_loss(I, I, F, build_laplacian(I), 0.0, 1.0) == doctest::Approx(4.0).epsilon(1e-14));

    const Matrix S = oracle::random_nonnegative(gen, 4);
    const double got = per_view_loss(X, S, F, build_laplacian(S), 1.0, 1.0);
    CHECK(std::abs(got - oracle::view_loss(X, S, F, 1.0, 1.0)) <= 1e-10 * std::max(1.0, got));
}

TEST_CASE("update_w fixed examples") {
    WeightQp one{Matrix::Ones(1, 1), Vector::Constant(1, 3.0), Vector::Zero(1)};
    CHECK(update_w(one) == Vector::Ones(1));
    WeightQp sym{Matrix::Identity(2, 2), Vector::Constant(2, 0.7), Vector::Zero(2)};
    const Vector w = update_w(sym);
    CHECK(std::abs(w(0) - 0.5) <= 1e-9);
    CHECK(std::abs(w(1) - 0.5) <= 1e-9);
}

TEST_CASE("update_w beats the simplex grid") {
    std::mt19937_64 gen(29);
    for (int rep = 0; rep < 30; ++rep) {
        const Matrix B = oracle::random_matrix(gen, 3, 3);
        WeightQp qp{B.transpose() * B, oracle::random_matrix(gen, 3, 1), Vector::Zero(3)};
        const Vector w = update_w(qp);
        CHECK(std::abs(w.sum() - 1.0) <= 1e-12);
        CHECK(w.minCoeff() >= 0.0);
        const double grid = oracle::simplex_grid_min([&](const Vector& x) { return qp.value(x); }, 3, 0.01);
        CHECK(qp.value(w) <= grid + 1e-6);
    }
}

TEST_CASE("update_w with P = 0 puts all mass on the smallest loss") {
    std::mt19937_64 gen(30);
    std::uniform_real_distribution<double> ud(0.0, 10.0);
    for (int rep = 0; rep < 20; ++rep) {
        Vector g(4);
        for (int i = 0; i < 4; ++i) g(i) = ud(gen);
        Eigen::Index best = 0;
        g.minCoeff(&best);
        const Vector w = update_w(WeightQp{Matrix::Zero(4, 4), -g, g});
        CHECK(w == Vector::Unit(4, best));
    }
}

TEST_CASE("update_w reports a stalled iteration") {
    // Badly conditioned curvature makes progress along the small eigenvalues slow.
    Matrix P = Matrix::Zero(3, 3);
    P.diagonal() << 1.0, 1e-3, 2e-3;
    WeightQpOptions opts;
    opts.max_iters = 3;
    CHECK_THROWS_AS(update_w(WeightQp{P, Vector::Zero(3), Vector::Zero(3)}, Vector::Constant(3, 1.0 / 3.0), opts),
                    ConvergenceFailure);
}

TEST_CASE("build_weight_qp matches trace definitions") {
    std::mt19937_64 gen(31);
    const std::vector<Matrix> F{oracle::random_orthonormal(gen, 6, 2), oracle::random_orthonormal(gen, 6, 2)};
    const Matrix Y = oracle::random_orthonormal(gen, 6, 2);
    Vector g(2);
    g << 1.5, 0.25;
    const auto qp = build_weight_qp(F, Y, g);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double ref = (F[i] * F[i].transpose() * F[j] * F[j].transpose()).trace();
            CHECK(std::abs(qp.P(i, j) - ref) <= 1e-12);
        }
        CHECK(std::abs(qp.q(i) - (-g(i) + 2.0 * (Y * Y.transpose() * F[i] * F[i].transpose()).trace())) <= 1e-12);
    }
}

TEST_CASE("update_y fixed examples") {
    std::mt19937_64 gen(32);
    const Matrix F1 = oracle::random_orthonormal(gen, 8, 2);
    const std::vector<Matrix> one{F1};
    CHECK(projector_gap(update_y(one, Vector::Ones(1)), F1) <= 1e-8);
    const std::vector<Matrix> same{F1, F1};
    Vector w(2);
    w << 0.3, 0.7;
    CHECK(projector_gap(update_y(same, w), F1) <= 1e-8);
}

TEST_CASE("update_y reaches the dense eigen oracle maximum") {
    std::mt19937_64 gen(33);
    for (int rep = 0; rep < 5; ++rep) {
        const std::vector<Matrix> F{oracle::random_orthonormal(gen, 8, 2), oracle::random_orthonormal(gen, 8, 2)};
        const Vector w = Vector::Constant(2, 0.5);
        const Matrix A = 0.5 * (F[0] * F[0].transpose() + F[1] * F[1].transpose());
        const Matrix Y = update_y(F, w);
        CHECK(orthonormality_error(Y) <= 1e-8);
        CHECK(std::abs((Y.transpose() * A * Y).trace() - oracle::max_trace(A, 2)) <= 1e-8);
    }
}

TEST_CASE("objective fixed examples and direct evaluation") {
    std::mt19937_64 gen(34);
    const Matrix X = oracle::random_matrix(gen, 3, 5);
    const auto data = MultiViewDataset::make({{"a", X}});
    ModelState s;
    s.F = {oracle::random_orthonormal(gen, 5, 2)};
    s.Y = s.F[0];
    s.w = Vector::Ones(1);
    s.S = {Matrix::Zero(5, 5)};
    const auto parts = objective_parts(s, data, 0.0, 1.0);
    CHECK(parts.total == doctest::Approx(X.squaredNorm()).epsilon(1e-12));
    CHECK(parts.fusion <= 1e-12);

    const std::vector<Matrix> same{s.F[0], s.F[0], s.F[0]};
    Vector w(3);
    w << 0.2, 0.3, 0.5;
    CHECK(fusion_term(same, w, s.F[0]) <= 1e-12);

    const auto data2 = MultiViewDataset::make({{"a", oracle::random_matrix(gen, 3, 6)}, {"b", oracle::random_matrix(gen, 4, 6)}});
    ModelState r;
    r.F = {oracle::random_orthonormal(gen, 6, 2), oracle::random_orthonormal(gen, 6, 2)};
    r.Y = oracle::random_orthonormal(gen, 6, 2);
    r.w = Vector(2);
    r.w << 0.35, 0.65;
    r.S = {oracle::random_nonnegative(gen, 6), oracle::random_nonnegative(gen, 6)};
    HyperParams p;
    p.alpha = 0.7;
    p.beta = 1.3;
    const double ref = r.w(0) * oracle::view_loss(data2.view(0).data, r.S[0], r.F[0], 0.7, 1.3) +
                       r.w(1) * oracle::view_loss(data2.view(1).data, r.S[1], r.F[1], 0.7, 1.3) +
                       oracle::fusion(r.F, r.w, r.Y);
    CHECK(std::abs(objective(r, data2, p) - ref) <= 1e-10 * std::max(1.0, ref));
    CHECK(std::abs(fusion_term(r.F, r.w, r.Y) - oracle::fusion(r.F, r.w, r.Y)) <= 1e-12);
}
