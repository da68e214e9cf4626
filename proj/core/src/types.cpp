#include "pfsc/types.hpp"

#include <algorithm>
#include <cmath>

#include "pfsc/error.hpp"

namespace pfsc {

MultiViewDataset MultiViewDataset::make(std::vector<ViewMatrix> views,
                                        std::optional<std::vector<int>> labels) {
    if (views.empty()) throw InvalidInput("dataset needs at least one view");
    const auto n = views.front().samples();
    if (n == 0) throw InvalidInput("dataset needs at least one sample");
    for (const auto& v : views) {
        if (v.samples() != n) {
            throw DimensionMismatch("view '" + v.name + "' has " + std::to_string(v.samples()) +
                                    " samples, expected " + std::to_string(n));
        }
        if (v.features() == 0) throw InvalidInput("view '" + v.name + "' has no features");
        if (!v.data.allFinite()) throw InvalidInput("view '" + v.name + "' has non-finite entries");
    }
    if (labels) {
        if (labels->size() != n) {
            throw DimensionMismatch("labels have length " + std::to_string(labels->size()) +
                                    ", expected " + std::to_string(n));
        }
        if (std::any_of(labels->begin(), labels->end(), [](int id) { return id < 0; })) {
            throw InvalidInput("labels must be non-negative");
        }
    }
    MultiViewDataset d;
    d.views_ = std::move(views);
    d.n_ = n;
    d.labels_ = std::move(labels);
    return d;
}

bool MultiViewDataset::operator==(const MultiViewDataset& other) const {
    if (n_ != other.n_ || views_.size() != other.views_.size() || labels_ != other.labels_) return false;
    for (std::size_t v = 0; v < views_.size(); ++v) {
        const auto& a = views_[v];
        const auto& b = other.views_[v];
        if (a.name != b.name || a.data.rows() != b.data.rows() || a.data.cols() != b.data.cols()) return false;
        if (a.data != b.data) return false;
    }
    return true;
}

void HyperParams::validate(std::size_t n) const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidInput("alpha must be a finite value >= 0");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidInput("beta must be a finite value > 0");
    if (c < 2) throw InvalidInput("cluster count must be at least 2");
    if (n > 0 && c > n) {
        throw InvalidInput("cluster count " + std::to_string(c) + " exceeds sample count " + std::to_string(n));
    }
    if (max_outer_iters < 1) throw InvalidInput("max_outer_iters must be at least 1");
    if (!(rel_obj_tol > 0.0)) throw InvalidInput("rel_obj_tol must be > 0");
    if (kmeans_restarts < 1) throw InvalidInput("kmeans_restarts must be at least 1");
    if (kmeans_max_iters < 1) throw InvalidInput("kmeans_max_iters must be at least 1");
}

double orthonormality_error(const Matrix& A) {
    const Matrix G = A.transpose() * A - Matrix::Identity(A.cols(), A.cols());
    return G.size() == 0 ? 0.0 : G.cwiseAbs().maxCoeff();
}

bool InvariantReport::ok() const {
    return max_f_orthogonality_error <= 1e-8 && y_orthogonality_error <= 1e-8 &&
           weight_sum_error <= 1e-12 && min_weight >= -1e-12 && min_s_entry >= 0.0;
}

InvariantReport check_invariants(const ModelState& state) {
    InvariantReport r;
    for (const auto& F : state.F) {
        r.max_f_orthogonality_error = std::max(r.max_f_orthogonality_error, orthonormality_error(F));
    }
    r.y_orthogonality_error = orthonormality_error(state.Y);
    r.weight_sum_error = state.w.size() == 0 ? 1.0 : std::abs(state.w.sum() - 1.0);
    r.min_weight = state.w.size() == 0 ? 0.0 : state.w.minCoeff();
    r.min_s_entry = 0.0;
    for (const auto& S : state.S) {
        if (S.size() > 0) r.min_s_entry = std::min(r.min_s_entry, S.minCoeff());
    }
    return r;
}

Labeling Labeling::from_ids(std::vector<int> ids) {
    if (ids.empty()) throw InvalidInput("labeling must not be empty");
    int max_id = 0;
    for (int id : ids) {
        if (id < 0) throw InvalidInput("cluster ids must be non-negative");
        max_id = std::max(max_id, id);
    }
    Labeling l;
    l.assignments = std::move(ids);
    l.c = static_cast<std::size_t>(max_id) + 1;
    return l;
}

} // namespace pfsc
