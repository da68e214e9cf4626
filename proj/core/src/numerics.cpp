#include "pfsc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "pfsc/error.hpp"

namespace pfsc::numerics {

namespace {

double asymmetry(const Matrix& M) {
    const double scale = std::max(M.cwiseAbs().maxCoeff(), 1.0);
    return (M - M.transpose()).cwiseAbs().maxCoeff() / scale;
}

void fix_signs(Matrix& V) {
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
        for (Eigen::Index i = 0; i < V.rows(); ++i) {
            if (std::abs(V(i, j)) > 1e-10) {
                if (V(i, j) < 0) V.col(j) *= -1.0;
                break;
            }
        }
    }
}

struct ShiftedEigs {
    Eigen::SelfAdjointEigenSolver<Matrix> solver;
    double shift = 0.0;  // solver ran on M + shift * I

    Vector eigenvalues() const { return solver.eigenvalues().array() - shift; }
    const Matrix& eigenvectors() const { return solver.eigenvectors(); }
};

ShiftedEigs full_eigs(const Matrix& M, std::size_t c) {
    if (M.rows() != M.cols()) throw DimensionMismatch("eigensolver needs a square matrix");
    if (c < 1 || c > static_cast<std::size_t>(M.rows())) {
        throw DimensionMismatch("requested " + std::to_string(c) + " eigenpairs of a " +
                                std::to_string(M.rows()) + "x" + std::to_string(M.cols()) + " matrix");
    }
    if (!M.allFinite()) throw InvalidInput("eigensolver input has non-finite entries");
    if (asymmetry(M) > 1e-8) throw InvalidInput("eigensolver input is not symmetric");
    const Matrix sym = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() == Eigen::Success) return ShiftedEigs{es, 0.0};

    // Eigen's implicit QR can stall on exact projectors (a large cluster of
    // zero eigenvalues). A diagonal shift leaves the eigenvectors unchanged.
    const auto n = sym.rows();
    const double scale = std::max(sym.cwiseAbs().maxCoeff(), 1e-300);
    for (const double shift : {1.0, -1.0, 0.5, -0.5}) {
        Eigen::SelfAdjointEigenSolver<Matrix> shifted(sym + (shift * scale) * Matrix::Identity(n, n));
        if (shifted.info() == Eigen::Success) return ShiftedEigs{shifted, shift * scale};
    }
    throw ConvergenceFailure("symmetric eigensolver did not converge");
}

} // namespace

Vector SpdFactorization::solve(const Vector& b) const {
    if (b.size() != llt_.rows()) throw DimensionMismatch("right-hand side has the wrong length");
    return llt_.solve(b);
}

Matrix SpdFactorization::solve(const Matrix& B) const {
    if (B.rows() != llt_.rows()) throw DimensionMismatch("right-hand side has the wrong row count");
    return llt_.solve(B);
}

SpdFactorization factor_spd(const Matrix& A) {
    if (A.rows() != A.cols() || A.rows() < 1) throw InvalidInput("factor_spd needs a non-empty square matrix");
    if (!A.allFinite()) throw InvalidInput("factor_spd input has non-finite entries");
    if (asymmetry(A) > 1e-10) throw InvalidInput("factor_spd input is not symmetric");
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("matrix is not positive definite (is beta too small?)");
    }
    return SpdFactorization(std::move(llt));
}

EigenPairs sym_eigs_smallest(const Matrix& M, std::size_t c) {
    const auto es = full_eigs(M, c);
    const auto k = static_cast<Eigen::Index>(c);
    EigenPairs out{es.eigenvectors().leftCols(k), es.eigenvalues().head(k)};
    fix_signs(out.vectors);
    return out;
}

EigenPairs sym_eigs_largest(const Matrix& M, std::size_t c) {
    const auto es = full_eigs(M, c);
    const auto n = M.rows();
    const auto k = static_cast<Eigen::Index>(c);
    EigenPairs out{Matrix(n, k), Vector(k)};
    const Vector values = es.eigenvalues();
    for (Eigen::Index j = 0; j < k; ++j) {
        out.vectors.col(j) = es.eigenvectors().col(n - 1 - j);
        out.values(j) = values(n - 1 - j);
    }
    fix_signs(out.vectors);
    return out;
}

Vector project_simplex(const Vector& v) {
    const auto t = v.size();
    if (t < 1) throw InvalidInput("cannot project an empty vector onto the simplex");
    if (!v.allFinite()) throw InvalidInput("simplex projection input has non-finite entries");

    std::vector<double> u(v.data(), v.data() + t);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (Eigen::Index j = 0; j < t; ++j) {
        cumsum += u[j];
        const double candidate = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0.0) theta = candidate;
    }
    Vector x = (v.array() - theta).cwiseMax(0.0);
    // Large-magnitude inputs lose the unit sum to cancellation; renormalize.
    const double s = x.sum();
    if (s > 0.0) {
        x /= s;
    } else {
        x.setZero();
        Eigen::Index best = 0;
        v.maxCoeff(&best);
        x(best) = 1.0;
    }
    return x;
}

double sym_spectral_norm(const Matrix& M) {
    if (M.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix G(rows, cols);
    // Column-major fill so the stream order is fixed by shape alone.
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) G(i, j) = normal();
    }
    return G;
}

Matrix orthonormalize(const Matrix& A) {
    if (A.cols() > A.rows()) throw DimensionMismatch("cannot orthonormalize more columns than rows");
    Eigen::HouseholderQR<Matrix> qr(A);
    return qr.householderQ() * Matrix::Identity(A.rows(), A.cols());
}

Matrix random_orthonormal(Eigen::Index n, Eigen::Index c, Rng& rng) {
    return orthonormalize(rng.gaussian_matrix(n, c));
}

} // namespace pfsc::numerics
