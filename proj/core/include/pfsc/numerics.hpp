#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Cholesky>

#include "pfsc/types.hpp"

namespace pfsc::numerics {

/// Cached Cholesky factor of a symmetric positive-definite matrix.
class SpdFactorization {
public:
    SpdFactorization() = default;
    explicit SpdFactorization(Eigen::LLT<Matrix> llt) : llt_(std::move(llt)) {}

    Vector solve(const Vector& b) const;
    Matrix solve(const Matrix& B) const;
    Eigen::Index size() const { return llt_.rows(); }

private:
    Eigen::LLT<Matrix> llt_;
};

/// Throws NotPositiveDefinite if A is not (numerically) positive definite,
/// InvalidInput if A is not square or not symmetric to 1e-10 relative.
SpdFactorization factor_spd(const Matrix& A);

struct EigenPairs {
    Matrix vectors;  // n x c, orthonormal columns
    Vector values;
};

/// c smallest eigenpairs of a symmetric matrix, ascending.
///
/// Inputs symmetric within 1e-8 relative are symmetrized as (M + M')/2 first.
/// Each eigenvector is signed so its first component with magnitude above
/// 1e-10 is positive.
EigenPairs sym_eigs_smallest(const Matrix& M, std::size_t c);

/// c largest eigenpairs of a symmetric matrix, descending. Same conventions
/// as sym_eigs_smallest.
EigenPairs sym_eigs_largest(const Matrix& M, std::size_t c);

/// Euclidean projection onto the probability simplex (sort and threshold).
Vector project_simplex(const Vector& v);

/// Spectral norm of a symmetric matrix.
double sym_spectral_norm(const Matrix& M);

/// Seeded 64-bit Mersenne twister. Not thread-safe; use one per task.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }
    bool bernoulli(double p) { return uniform() < p; }

    Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Thin-QR orthonormal basis of the columns of A (n x c, c <= n).
Matrix orthonormalize(const Matrix& A);

/// Orthonormalized i.i.d. standard normal n x c draw.
Matrix random_orthonormal(Eigen::Index n, Eigen::Index c, Rng& rng);

} // namespace pfsc::numerics
