#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "pfsc/blocks.hpp"
#include "pfsc/labels.hpp"
#include "pfsc/numerics.hpp"
#include "pfsc/types.hpp"

namespace pfsc::solver {

struct FitResult {
    ModelState state;
    FitTrace trace;
    Labeling labels;  // from the consensus partition Y
};

/// Random orthonormal F_v (drawn in view order) and Y (drawn last), uniform
/// weights, zero graphs.
ModelState init_state(const MultiViewDataset& data, const HyperParams& params, numerics::Rng& rng);

/// Called after every outer iteration with the 1-based iteration number.
using IterationObserver = std::function<void(std::size_t, const ModelState&)>;

/// Alternating minimization: per view S, clamp, F (and w under
/// WeightSchedule::per_view), then the consensus Y. Stops when the relative
/// objective change drops to rel_obj_tol or after max_outer_iters passes.
FitResult fit(const MultiViewDataset& data, const HyperParams& params, const IterationObserver& observer = {});

/// fit(), then writes the trace to `path`. Throws IoError on an empty or
/// unwritable path (checked before fitting).
FitResult fit_with_trace_export(const MultiViewDataset& data, const HyperParams& params,
                                const std::filesystem::path& path);

labels::KMeansConfig kmeans_config(const HyperParams& params);

/// Discrete labels from the per-view partition F_v.
Labeling partition_labels(const FitResult& result, std::size_t v, const HyperParams& params);

/// `iter,objective,w_1,...,w_t` with 17 significant digits.
void write_trace(const FitTrace& trace, const std::filesystem::path& path);

/// Reads back the objective and weight columns; iters_run is the row count.
/// converged, initial_objective and violations are not stored in the file.
FitTrace read_trace(const std::filesystem::path& path);

} // namespace pfsc::solver
